/* Copyright 2026 The mood3d Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "mood3d/geometry.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>


#include "mood3d/error.h"

namespace mood3d {
namespace {

// Vertex classification tolerance for half-space clipping. Points within it
// of a plane count as inside.
constexpr double kPlaneEpsilon = 1e-12;

bool AllFinite(const Mat3& m) { return m.allFinite(); }

Vec3 Vee(const Mat3& m) {
  return {m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1)};
}

using Polygon = std::vector<Vec3>;
using Polyhedron = std::vector<Polygon>;

// Faces wound counter-clockwise when seen from outside.
Polyhedron CuboidFaces(const std::array<Vec3, 8>& c) {
  return {
      {c[0], c[4], c[6], c[2]},  // -x
      {c[1], c[3], c[7], c[5]},  // +x
      {c[0], c[1], c[5], c[4]},  // -y
      {c[2], c[6], c[7], c[3]},  // +y
      {c[0], c[2], c[3], c[1]},  // -z
      {c[4], c[5], c[7], c[6]},  // +z
  };
}

struct HalfSpace {
  Vec3 normal;  // outward, unit length
  double offset;

  double Distance(const Vec3& p) const { return normal.dot(p) - offset; }
};

std::array<HalfSpace, 6> CuboidHalfSpaces(const Box3D& box) {
  std::array<HalfSpace, 6> planes;
  for (int axis = 0; axis < 3; ++axis) {
    const Vec3 n = box.rotation.column(axis);
    const double c = n.dot(box.center);
    const double half = 0.5 * box.dims[axis];
    planes[2 * axis] = {n, c + half};
    planes[2 * axis + 1] = {-n, -c + half};
  }
  return planes;
}

void AppendUnique(Polygon& points, const Vec3& p) {
  for (const Vec3& q : points) {
    if ((q - p).squaredNorm() <= kPlaneEpsilon * kPlaneEpsilon) return;
  }
  points.push_back(p);
}

// Orders coplanar points counter-clockwise around `normal`.
void SortAroundNormal(Polygon& points, const Vec3& normal) {
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());
  const Vec3 u = normal.unitOrthogonal();
  const Vec3 w = normal.cross(u);
  std::vector<std::pair<double, Vec3>> keyed;
  keyed.reserve(points.size());
  for (const Vec3& p : points) {
    const Vec3 d = p - centroid;
    keyed.emplace_back(std::atan2(d.dot(w), d.dot(u)), p);
  }
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& l, const auto& r) { return l.first < r.first; });
  for (size_t i = 0; i < keyed.size(); ++i) points[i] = keyed[i].second;
}

// Clips a closed convex polyhedron against one half-space and caps the cut.
Polyhedron Clip(const Polyhedron& poly, const HalfSpace& plane) {
  bool any_outside = false;
  bool any_inside = false;
  for (const Polygon& face : poly) {
    for (const Vec3& v : face) {
      if (plane.Distance(v) > kPlaneEpsilon) {
        any_outside = true;
      } else {
        any_inside = true;
      }
    }
  }
  if (!any_outside) return poly;
  if (!any_inside) return {};

  Polyhedron out;
  Polygon cap;
  bool face_on_plane = false;
  for (const Polygon& face : poly) {
    Polygon clipped;
    const size_t n = face.size();
    bool all_on_plane = true;
    for (size_t i = 0; i < n; ++i) {
      const Vec3& p = face[i];
      const Vec3& q = face[(i + 1) % n];
      const double dp = plane.Distance(p);
      const double dq = plane.Distance(q);
      const bool p_in = dp <= kPlaneEpsilon;
      const bool q_in = dq <= kPlaneEpsilon;
      if (std::abs(dp) > kPlaneEpsilon) all_on_plane = false;
      if (p_in) {
        clipped.push_back(p);
        if (std::abs(dp) <= kPlaneEpsilon) AppendUnique(cap, p);
      }
      if (p_in != q_in) {
        const Vec3 x = p + (dp / (dp - dq)) * (q - p);
        clipped.push_back(x);
        AppendUnique(cap, x);
      }
    }
    if (all_on_plane) face_on_plane = true;
    if (clipped.size() >= 3) out.push_back(std::move(clipped));
  }
  if (!face_on_plane && cap.size() >= 3) {
    SortAroundNormal(cap, plane.normal);
    out.push_back(std::move(cap));
  }
  return out;
}

// Sum of signed tetrahedra from an interior reference point.
double Volume(const Polyhedron& poly) {
  Vec3 ref = Vec3::Zero();
  int count = 0;
  for (const Polygon& face : poly) {
    for (const Vec3& v : face) {
      ref += v;
      ++count;
    }
  }
  if (count == 0) return 0.0;
  ref /= count;
  double six_volume = 0.0;
  for (const Polygon& face : poly) {
    const Vec3 a = face[0] - ref;
    for (size_t i = 1; i + 1 < face.size(); ++i) {
      six_volume += a.dot((face[i] - ref).cross(face[i + 1] - ref));
    }
  }
  return std::max(0.0, six_volume / 6.0);
}

std::array<double, 15> BoxKey(const Box3D& box) {
  std::array<double, 15> key;
  for (int i = 0; i < 3; ++i) {
    key[i] = box.center[i];
    key[3 + i] = box.dims[i];
  }
  for (int i = 0; i < 9; ++i) key[6 + i] = box.rotation.matrix().data()[i];
  return key;
}

bool BoxLess(const Box3D& l, const Box3D& r) { return BoxKey(l) < BoxKey(r); }

void RequireFinite(double v, const char* field) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(field) + " must be finite");
  }
}

}  // namespace

void CameraIntrinsics::Validate() const {
  RequireFinite(fx, "fx");
  RequireFinite(fy, "fy");
  RequireFinite(cx, "cx");
  RequireFinite(cy, "cy");
  if (fx <= 0.0 || fy <= 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "focal lengths must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "image size must be positive");
  }
}

Mat3 CameraIntrinsics::Matrix() const {
  Mat3 k;
  k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return k;
}

void Box2D::Validate() const {
  RequireFinite(x1, "x1");
  RequireFinite(y1, "y1");
  RequireFinite(x2, "x2");
  RequireFinite(y2, "y2");
  if (x2 < x1) throw Error(ErrorCode::kInvalidArgument, "x2 < x1");
  if (y2 < y1) throw Error(ErrorCode::kInvalidArgument, "y2 < y1");
}

Rotation::Rotation(const Mat3& matrix) : matrix_(matrix) {
  if (!AllFinite(matrix)) {
    throw Error(ErrorCode::kInvalidArgument, "rotation must be finite");
  }
  const double ortho =
      (matrix.transpose() * matrix - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (ortho > kTolerance) {
    std::ostringstream msg;
    msg << "rotation is not orthonormal (max |R^T R - I| = " << ortho << ")";
    throw Error(ErrorCode::kInvalidArgument, msg.str());
  }
  if (std::abs(matrix.determinant() - 1.0) > kTolerance) {
    throw Error(ErrorCode::kInvalidArgument, "rotation determinant is not +1");
  }
}

Rotation Rotation::FromAxisAngle(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (!(n > 0.0) || !std::isfinite(angle)) {
    throw Error(ErrorCode::kDegenerateInput, "axis must be non-zero");
  }
  return Rotation(Eigen::AngleAxisd(angle, axis / n).toRotationMatrix(),
                  Unchecked{});
}

Rotation Rotation::FromRotationVector(const Vec3& omega) {
  const double theta = omega.norm();
  if (theta == 0.0) return Identity();
  return FromAxisAngle(omega, theta);
}

Vec3 Rotation::ToRotationVector() const {
  const double cos_theta =
      std::clamp((matrix_.trace() - 1.0) / 2.0, -1.0, 1.0);
  const Vec3 v = Vee(matrix_);  // 2 sin(theta) * axis
  const double theta = std::atan2(0.5 * v.norm(), cos_theta);
  if (theta < 1e-8) return 0.5 * v;
  if (theta > std::numbers::pi - 1e-6) {
    // sin(theta) ~ 0: read the axis off the symmetric part instead.
    const Mat3 sym = 0.5 * (matrix_ + matrix_.transpose()) -
                     cos_theta * Mat3::Identity();
    int i = 0;
    sym.diagonal().maxCoeff(&i);
    Vec3 axis = sym.col(i).normalized();
    if (axis.dot(v) < 0.0) axis = -axis;
    return theta * axis;
  }
  return (theta / v.norm()) * v;
}

Rotation Rotation::operator*(const Rotation& other) const {
  return Rotation(matrix_ * other.matrix_, Unchecked{});
}

Rotation Rotation::Transpose() const {
  return Rotation(matrix_.transpose(), Unchecked{});
}

void Box3D::Validate() const {
  if (!center.allFinite() || !dims.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "box fields must be finite");
  }
  if ((dims.array() <= 0.0).any()) {
    throw Error(ErrorCode::kDegenerateBox, "box dimensions must be positive");
  }
}

Vec2 Project(const Vec3& point, const CameraIntrinsics& k) {
  if (!(point.z() > 0.0)) {
    throw Error(ErrorCode::kNonPositiveDepth, "point is not in front of the camera");
  }
  return {k.fx * point.x() / point.z() + k.cx,
          k.fy * point.y() / point.z() + k.cy};
}

Vec3 Unproject(const Vec2& pixel, double depth, const CameraIntrinsics& k) {
  if (!(depth > 0.0)) {
    throw Error(ErrorCode::kNonPositiveDepth, "depth must be positive");
  }
  return {(pixel.x() - k.cx) / k.fx * depth, (pixel.y() - k.cy) / k.fy * depth,
          depth};
}

Rotation Rot6DToMatrix(const Rot6D& r) {
  constexpr double kEps = 1e-12;
  const double na = r.a.norm();
  if (!(na >= kEps) || !r.b.allFinite()) {
    throw Error(ErrorCode::kDegenerateInput, "first 6D column is zero");
  }
  const Vec3 c1 = r.a / na;
  const Vec3 b_perp = r.b - r.b.dot(c1) * c1;
  const double nb = b_perp.norm();
  if (!(nb >= kEps * std::max(1.0, r.b.norm()))) {
    throw Error(ErrorCode::kDegenerateInput, "6D columns are parallel");
  }
  const Vec3 c2 = b_perp / nb;
  Mat3 m;
  m.col(0) = c1;
  m.col(1) = c2;
  m.col(2) = c1.cross(c2);
  return Rotation(m);
}

Rot6D MatrixToRot6D(const Rotation& r) { return {r.column(0), r.column(1)}; }

double GeodesicAngle(const Rotation& r1, const Rotation& r2) {
  // Same angle as acos((tr(R1^T R2) - 1) / 2), without acos's loss of
  // precision near 0 and pi.
  const Mat3 m = r1.matrix().transpose() * r2.matrix();
  const double c = std::clamp((m.trace() - 1.0) / 2.0, -1.0, 1.0);
  const double s = 0.5 * Vee(m).norm();
  return std::atan2(s, c);
}

std::array<Vec3, 8> Corners(const Box3D& box) {
  std::array<Vec3, 8> out;
  const Vec3 half = 0.5 * box.dims;
  for (int i = 0; i < 8; ++i) {
    const Vec3 local((i & 1) ? half.x() : -half.x(),
                     (i & 2) ? half.y() : -half.y(),
                     (i & 4) ? half.z() : -half.z());
    out[i] = box.center + box.rotation.matrix() * local;
  }
  return out;
}

double IntersectionVolume(const Box3D& a, const Box3D& b) {
  a.Validate();
  b.Validate();
  if (BoxKey(a) == BoxKey(b)) return a.Volume();
  // Fixed argument order keeps the result bit-identical under swapping.
  const bool swap = BoxLess(b, a);
  const Box3D& subject = swap ? b : a;
  const Box3D& clipper = swap ? a : b;
  Polyhedron poly = CuboidFaces(Corners(subject));
  for (const HalfSpace& plane : CuboidHalfSpaces(clipper)) {
    poly = Clip(poly, plane);
    if (poly.empty()) return 0.0;
  }
  return std::min({Volume(poly), a.Volume(), b.Volume()});
}

double Iou3d(const Box3D& a, const Box3D& b) {
  const double inter = IntersectionVolume(a, b);
  const double uni = a.Volume() + b.Volume() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double CenterDistance(const Box3D& a, const Box3D& b) {
  return (a.center - b.center).norm();
}

double GtRadius(const Box3D& box, RadiusMode mode) {
  switch (mode) {
    case RadiusMode::kInscribed:
      return 0.5 * box.dims.minCoeff();
    case RadiusMode::kCircumscribed:
      break;
  }
  return 0.5 * box.dims.norm();
}

}  // namespace mood3d
