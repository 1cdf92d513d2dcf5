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

// Canonical image space and the 2D-to-3D box decode.

#ifndef MOOD3D_LIFTING_H_
#define MOOD3D_LIFTING_H_

#include <Eigen/Core>

#include "mood3d/geometry.h"

namespace mood3d {

struct CanonicalConfig {
  int canon_height = 800;
  int canon_width = 1333;
  double pad_value = 0.0;

  void Validate() const;
};

// Resize by `scale`, then center pad into the canonical canvas. The leading
// pad is floor((canvas - resized) / 2); the remainder goes to the trailing
// side.
struct CanonicalTransform {
  double scale = 1.0;
  int pad_left = 0;
  int pad_top = 0;
  int source_width = 0;
  int source_height = 0;
  int resized_width = 0;
  int resized_height = 0;
  int canon_width = 0;
  int canon_height = 0;
};

struct CanonicalResult {
  CanonicalTransform transform;
  CameraIntrinsics intrinsics;  // sized to the canonical canvas
};

CanonicalResult Canonicalize(const CameraIntrinsics& k,
                             const CanonicalConfig& cfg = {});

Vec2 ApplyTransform(const Vec2& pixel, const CanonicalTransform& t);
Vec2 InvertTransform(const Vec2& pixel, const CanonicalTransform& t);

struct LiftScales {
  double s_depth = 1.0;
  double s_dim = 1.0;

  void Validate() const;
};

// The twelve regressed values, in this order: u_off, v_off, d_log,
// dims_log (3), rot6d.a (3), rot6d.b (3). Offsets are pixels relative to the
// 2D box center.
struct LiftParams {
  static constexpr int kSize = 12;
  using Vector = Eigen::Matrix<double, kSize, 1>;

  double u_off = 0.0;
  double v_off = 0.0;
  double d_log = 0.0;
  Vec3 dims_log = Vec3::Zero();
  Rot6D rot6d;

  Vector ToVector() const;
  static LiftParams FromVector(const Vector& v);
};

double DecodeDepth(double d_log, const LiftScales& s);
double EncodeDepth(double depth, const LiftScales& s);
Vec3 DecodeDims(const Vec3& dims_log, const LiftScales& s);
Vec3 EncodeDims(const Vec3& dims, const LiftScales& s);

Box3D Lift(const LiftParams& params, const Box2D& box2d,
           const CameraIntrinsics& k, const LiftScales& s = {});

// Lift output in a minimal chart: center (3), dims (3), rotation vector (3).
using LiftOutput = Eigen::Matrix<double, 9, 1>;
using LiftJacobianMatrix = Eigen::Matrix<double, 9, LiftParams::kSize>;

LiftOutput LiftOutputChart(const Box3D& box);

// d LiftOutputChart(Lift(params)) / d params. The rotation chart is singular
// at a rotation angle of pi.
LiftJacobianMatrix LiftJacobian(const LiftParams& params, const Box2D& box2d,
                                const CameraIntrinsics& k,
                                const LiftScales& s = {});

}  // namespace mood3d

#endif  // MOOD3D_LIFTING_H_
