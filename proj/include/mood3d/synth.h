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

// Seeded synthetic scenes and noisy predictions for exercising the metrics.
//
// Every frame draws from its own random substream keyed by (seed, purpose,
// frame index), so output does not depend on how frames are scheduled.

#ifndef MOOD3D_SYNTH_H_
#define MOOD3D_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "mood3d/geometry.h"
#include "mood3d/metrics.h"

namespace mood3d {

// Log-normal dimensions: log(dim_i) ~ N(log_dim_mean_i, log_dim_std_i).
struct ClassSpec {
  std::string name;
  Vec3 log_dim_mean = Vec3::Zero();
  Vec3 log_dim_std = Vec3::Zero();
  double weight = 1.0;
};

struct SceneSpec {
  int n_frames = 10;
  int min_objects = 1;
  int max_objects = 5;
  std::vector<ClassSpec> classes;
  double min_depth = 5.0;
  double max_depth = 40.0;
  CameraIntrinsics intrinsics{1000.0, 1000.0, 960.0, 540.0, 1920, 1080};
  std::uint64_t seed = 0;

  // Throws Error(kInvalidSpec).
  void Validate() const;
};

struct SceneFrame {
  std::string frame_id;
  CameraIntrinsics intrinsics;
  std::vector<GroundTruth> objects;
};

struct Scene {
  SceneSpec spec;
  std::vector<SceneFrame> frames;

  std::vector<GroundTruth> AllGroundTruth() const;
};

struct PerturbModel {
  double sigma_t = 0.0;  // meters, per axis
  double sigma_s = 0.0;  // log-dimension std
  double sigma_r = 0.0;  // radians, per rotation-vector axis
  double p_miss = 0.0;
  double fp_rate = 0.0;  // Poisson mean per frame
  std::uint64_t seed = 0;

  void Validate() const;
};

Scene Generate(const SceneSpec& spec, int threads = 1);

// One detection per surviving GT, scored exp(-center_error / sigma_t) (0.5
// when sigma_t is 0), plus uniformly placed false positives. Returned in
// frame order.
std::vector<Detection> Perturb(const Scene& scene, const PerturbModel& model,
                               int threads = 1);

// A single-class scene of fixed-size boxes (log_dim_std = 0).
SceneSpec FixedSizeScene(const std::string& label, const Vec3& dims,
                         int n_frames, std::uint64_t seed);

}  // namespace mood3d

#endif  // MOOD3D_SYNTH_H_
