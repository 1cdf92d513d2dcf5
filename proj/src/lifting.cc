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

#include "mood3d/lifting.h"

#include <cmath>

#include "mood3d/error.h"

namespace mood3d {
namespace {

Mat3 Skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

Vec3 Vee(const Mat3& m) {
  return 0.5 * Vec3(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
}

// Inverse of the left Jacobian of SO(3) at rotation vector omega.
Mat3 LeftJacobianInverse(const Vec3& omega) {
  const double theta = omega.norm();
  const Mat3 w = Skew(omega);
  if (theta < 1e-6) return Mat3::Identity() - 0.5 * w + (1.0 / 12.0) * w * w;
  const double coeff = 1.0 / (theta * theta) -
                       (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
  return Mat3::Identity() - 0.5 * w + coeff * w * w;
}

double CheckedExp(double x, const char* what) {
  const double v = std::exp(x);
  if (!std::isfinite(v) || v <= 0.0) {
    throw Error(ErrorCode::kOverflow, std::string(what) + " is not representable");
  }
  return v;
}

}  // namespace

void CanonicalConfig::Validate() const {
  if (canon_height <= 0 || canon_width <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "canonical size must be positive");
  }
}

CanonicalResult Canonicalize(const CameraIntrinsics& k,
                             const CanonicalConfig& cfg) {
  k.Validate();
  cfg.Validate();
  CanonicalTransform t;
  t.source_width = k.width;
  t.source_height = k.height;
  t.canon_width = cfg.canon_width;
  t.canon_height = cfg.canon_height;
  t.scale = std::min(static_cast<double>(cfg.canon_width) / k.width,
                     static_cast<double>(cfg.canon_height) / k.height);
  // Round half up, never past the canvas.
  t.resized_width = std::min(
      cfg.canon_width, static_cast<int>(std::floor(t.scale * k.width + 0.5)));
  t.resized_height = std::min(
      cfg.canon_height, static_cast<int>(std::floor(t.scale * k.height + 0.5)));
  t.pad_left = (cfg.canon_width - t.resized_width) / 2;
  t.pad_top = (cfg.canon_height - t.resized_height) / 2;

  CameraIntrinsics out;
  out.fx = k.fx * t.scale;
  out.fy = k.fy * t.scale;
  out.cx = k.cx * t.scale + t.pad_left;
  out.cy = k.cy * t.scale + t.pad_top;
  out.width = cfg.canon_width;
  out.height = cfg.canon_height;
  return {t, out};
}

Vec2 ApplyTransform(const Vec2& pixel, const CanonicalTransform& t) {
  return t.scale * pixel + Vec2(t.pad_left, t.pad_top);
}

Vec2 InvertTransform(const Vec2& pixel, const CanonicalTransform& t) {
  return (pixel - Vec2(t.pad_left, t.pad_top)) / t.scale;
}

void LiftScales::Validate() const {
  if (!(s_depth > 0.0) || !(s_dim > 0.0) || !std::isfinite(s_depth) ||
      !std::isfinite(s_dim)) {
    throw Error(ErrorCode::kInvalidArgument, "lift scales must be positive");
  }
}

LiftParams::Vector LiftParams::ToVector() const {
  Vector v;
  v << u_off, v_off, d_log, dims_log, rot6d.a, rot6d.b;
  return v;
}

LiftParams LiftParams::FromVector(const Vector& v) {
  LiftParams p;
  p.u_off = v[0];
  p.v_off = v[1];
  p.d_log = v[2];
  p.dims_log = v.segment<3>(3);
  p.rot6d.a = v.segment<3>(6);
  p.rot6d.b = v.segment<3>(9);
  return p;
}

double DecodeDepth(double d_log, const LiftScales& s) {
  s.Validate();
  return CheckedExp(d_log / s.s_depth, "decoded depth");
}

double EncodeDepth(double depth, const LiftScales& s) {
  s.Validate();
  if (!(depth > 0.0)) {
    throw Error(ErrorCode::kNonPositiveDepth, "depth must be positive");
  }
  return s.s_depth * std::log(depth);
}

Vec3 DecodeDims(const Vec3& dims_log, const LiftScales& s) {
  s.Validate();
  return {CheckedExp(dims_log.x() / s.s_dim, "decoded width"),
          CheckedExp(dims_log.y() / s.s_dim, "decoded length"),
          CheckedExp(dims_log.z() / s.s_dim, "decoded height")};
}

Vec3 EncodeDims(const Vec3& dims, const LiftScales& s) {
  s.Validate();
  if ((dims.array() <= 0.0).any()) {
    throw Error(ErrorCode::kDegenerateBox, "dimensions must be positive");
  }
  return s.s_dim * dims.array().log().matrix();
}

Box3D Lift(const LiftParams& params, const Box2D& box2d,
           const CameraIntrinsics& k, const LiftScales& s) {
  box2d.Validate();
  k.Validate();
  if (!params.ToVector().allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "lift parameters must be finite");
  }
  const Vec2 projected = box2d.Center() + Vec2(params.u_off, params.v_off);
  Box3D box;
  box.center = Unproject(projected, DecodeDepth(params.d_log, s), k);
  box.dims = DecodeDims(params.dims_log, s);
  box.rotation = Rot6DToMatrix(params.rot6d);
  box.Validate();
  return box;
}

LiftOutput LiftOutputChart(const Box3D& box) {
  LiftOutput out;
  out << box.center, box.dims, box.rotation.ToRotationVector();
  return out;
}

LiftJacobianMatrix LiftJacobian(const LiftParams& params, const Box2D& box2d,
                                const CameraIntrinsics& k,
                                const LiftScales& s) {
  const Box3D box = Lift(params, box2d, k, s);
  LiftJacobianMatrix j = LiftJacobianMatrix::Zero();

  // Center: x = (u - cx) z / fx, y = (v - cy) z / fy, z = exp(d / s_depth).
  const double z = box.center.z();
  j(0, 0) = z / k.fx;
  j(1, 1) = z / k.fy;
  j.block<3, 1>(0, 2) = box.center / s.s_depth;

  for (int i = 0; i < 3; ++i) j(3 + i, 3 + i) = box.dims[i] / s.s_dim;

  // Rotation: differentiate Gram-Schmidt, then map dR into the rotation
  // vector chart through the inverse left Jacobian.
  const Vec3& a = params.rot6d.a;
  const Vec3& b = params.rot6d.b;
  const double na = a.norm();
  const Vec3 c1 = a / na;
  const Vec3 b_perp = b - b.dot(c1) * c1;
  const double nb = b_perp.norm();
  const Vec3 c2 = b_perp / nb;
  const Mat3 proj1 = (Mat3::Identity() - c1 * c1.transpose()) / na;
  const Mat3 proj2 = (Mat3::Identity() - c2 * c2.transpose()) / nb;
  const Mat3& r = box.rotation.matrix();
  const Mat3 jl_inv = LeftJacobianInverse(box.rotation.ToRotationVector());

  for (int input = 0; input < 6; ++input) {
    Vec3 da = Vec3::Zero();
    Vec3 db = Vec3::Zero();
    if (input < 3) {
      da[input] = 1.0;
    } else {
      db[input - 3] = 1.0;
    }
    const Vec3 dc1 = proj1 * da;
    const Vec3 db_perp =
        db - db.dot(c1) * c1 - b.dot(dc1) * c1 - b.dot(c1) * dc1;
    const Vec3 dc2 = proj2 * db_perp;
    const Vec3 dc3 = dc1.cross(c2) + c1.cross(dc2);
    Mat3 dr;
    dr << dc1, dc2, dc3;
    j.block<3, 1>(6, 6 + input) = jl_inv * Vee(dr * r.transpose());
  }
  return j;
}

}  // namespace mood3d
