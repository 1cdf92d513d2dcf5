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

// Camera-frame geometry primitives.
//
// Conventions: +x right, +y down, +z forward. Lengths are meters, pixels are
// reals, angles are radians. Box dimensions (w, l, h) are extents along the
// box's local x, y and z axes, i.e. along the columns of its rotation.

#ifndef MOOD3D_GEOMETRY_H_
#define MOOD3D_GEOMETRY_H_

#include <array>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace mood3d {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 1;
  int height = 1;

  // Throws Error(kInvalidArgument) when the pinhole invariants do not hold.
  void Validate() const;
  Mat3 Matrix() const;
};

struct Box2D {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  Vec2 Center() const { return {0.5 * (x1 + x2), 0.5 * (y1 + y2)}; }
  double Area() const { return (x2 - x1) * (y2 - y1); }
  void Validate() const;
};

// A proper rotation matrix. Construction from an arbitrary matrix checks
// orthonormality and det = +1 to within kTolerance.
class Rotation {
 public:
  static constexpr double kTolerance = 1e-9;

  Rotation() : matrix_(Mat3::Identity()) {}
  explicit Rotation(const Mat3& matrix);

  static Rotation Identity() { return Rotation(); }
  // Rodrigues; `axis` need not be normalized but must be non-zero.
  static Rotation FromAxisAngle(const Vec3& axis, double angle);
  // Exponential map of a rotation vector (axis * angle).
  static Rotation FromRotationVector(const Vec3& omega);

  const Mat3& matrix() const { return matrix_; }
  Vec3 column(int i) const { return matrix_.col(i); }

  // Logarithm map; the returned vector has norm in [0, pi].
  Vec3 ToRotationVector() const;

  Rotation operator*(const Rotation& other) const;
  Rotation Transpose() const;

 private:
  struct Unchecked {};
  Rotation(const Mat3& matrix, Unchecked) : matrix_(matrix) {}

  Mat3 matrix_;
};

// Two unnormalized columns; Gram-Schmidt turns them into a rotation.
struct Rot6D {
  Vec3 a = Vec3::UnitX();
  Vec3 b = Vec3::UnitY();
};

struct Box3D {
  Vec3 center = Vec3::Zero();
  Vec3 dims = Vec3::Ones();  // (w, l, h)
  Rotation rotation;

  void Validate() const;
  double Volume() const { return dims.prod(); }
};

// Which sphere defines the radius of a ground-truth box.
enum class RadiusMode {
  kCircumscribed,  // half the space diagonal
  kInscribed,      // half the smallest dimension
};

Vec2 Project(const Vec3& point, const CameraIntrinsics& k);
Vec3 Unproject(const Vec2& pixel, double depth, const CameraIntrinsics& k);

Rotation Rot6DToMatrix(const Rot6D& r);
Rot6D MatrixToRot6D(const Rotation& r);

// SO(3) distance in [0, pi].
double GeodesicAngle(const Rotation& r1, const Rotation& r2);

// Corner i has local signs (bit0 -> x, bit1 -> y, bit2 -> z), bit clear
// meaning the negative half extent. So x varies fastest, then y, then z.
std::array<Vec3, 8> Corners(const Box3D& box);

// Exact volume of the intersection of two oriented cuboids.
double IntersectionVolume(const Box3D& a, const Box3D& b);
double Iou3d(const Box3D& a, const Box3D& b);

double CenterDistance(const Box3D& a, const Box3D& b);
double GtRadius(const Box3D& box,
                RadiusMode mode = RadiusMode::kCircumscribed);

}  // namespace mood3d

#endif  // MOOD3D_GEOMETRY_H_
