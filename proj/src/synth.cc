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

#include "mood3d/synth.h"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "mood3d/error.h"
#include "parallel.h"

namespace mood3d {
namespace {

enum Stream : std::uint64_t {
  kSceneStream = 1,
  kNoiseStream = 2,
  kFalsePositiveStream = 3,
};

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 Substream(std::uint64_t seed, Stream stream,
                          std::uint64_t frame) {
  return std::mt19937_64(
      SplitMix64(SplitMix64(seed ^ SplitMix64(stream)) + frame));
}

std::string FrameId(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%06d", index);
  return buf;
}

struct ObjectSampler {
  const SceneSpec& spec;
  std::discrete_distribution<int> class_dist;

  explicit ObjectSampler(const SceneSpec& s) : spec(s) {
    std::vector<double> w;
    for (const ClassSpec& c : s.classes) w.push_back(c.weight);
    class_dist = std::discrete_distribution<int>(w.begin(), w.end());
  }

  // A box whose center projects inside the image, yawed about the camera
  // y axis.
  std::pair<std::string, Box3D> Sample(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const ClassSpec& cls = spec.classes[class_dist(rng)];
    Box3D box;
    for (int i = 0; i < 3; ++i) {
      box.dims[i] =
          std::exp(cls.log_dim_mean[i] + cls.log_dim_std[i] * normal(rng));
    }
    const CameraIntrinsics& k = spec.intrinsics;
    const Vec2 pixel(unit(rng) * k.width, unit(rng) * k.height);
    const double depth =
        spec.min_depth + unit(rng) * (spec.max_depth - spec.min_depth);
    box.center = Unproject(pixel, depth, k);
    const double yaw = (2.0 * unit(rng) - 1.0) * std::numbers::pi;
    box.rotation = Rotation::FromAxisAngle(Vec3::UnitY(), yaw);
    return {cls.name, box};
  }
};

void Require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kInvalidSpec, what);
}

}  // namespace

void SceneSpec::Validate() const {
  Require(n_frames >= 0, "n_frames must be >= 0");
  Require(min_objects >= 0 && max_objects >= min_objects,
          "object counts must satisfy 0 <= min_objects <= max_objects");
  Require(!classes.empty(), "at least one class is required");
  double total_weight = 0.0;
  for (const ClassSpec& c : classes) {
    Require(!c.name.empty(), "class names must be non-empty");
    Require(c.log_dim_mean.allFinite() && c.log_dim_std.allFinite() &&
                (c.log_dim_std.array() >= 0.0).all(),
            "class " + c.name + " has an invalid dimension distribution");
    Require(std::isfinite(c.weight) && c.weight >= 0.0,
            "class weights must be >= 0");
    total_weight += c.weight;
  }
  Require(total_weight > 0.0, "class weights must not all be zero");
  Require(std::isfinite(min_depth) && std::isfinite(max_depth) &&
              min_depth > 0.0 && max_depth >= min_depth,
          "depth range must satisfy 0 < min_depth <= max_depth");
  try {
    intrinsics.Validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidSpec, e.what());
  }
}

std::vector<GroundTruth> Scene::AllGroundTruth() const {
  std::vector<GroundTruth> out;
  for (const SceneFrame& f : frames) {
    out.insert(out.end(), f.objects.begin(), f.objects.end());
  }
  return out;
}

void PerturbModel::Validate() const {
  Require(sigma_t >= 0.0 && sigma_s >= 0.0 && sigma_r >= 0.0 &&
              std::isfinite(sigma_t) && std::isfinite(sigma_s) &&
              std::isfinite(sigma_r),
          "noise levels must be finite and >= 0");
  Require(p_miss >= 0.0 && p_miss <= 1.0, "p_miss must lie in [0, 1]");
  Require(std::isfinite(fp_rate) && fp_rate >= 0.0, "fp_rate must be >= 0");
}

Scene Generate(const SceneSpec& spec, int threads) {
  spec.Validate();
  Scene scene;
  scene.spec = spec;
  scene.frames.resize(spec.n_frames);
  internal::ParallelFor(scene.frames.size(), threads, [&](size_t f) {
    std::mt19937_64 rng = Substream(spec.seed, kSceneStream, f);
    ObjectSampler sampler(spec);
    SceneFrame& frame = scene.frames[f];
    frame.frame_id = FrameId(static_cast<int>(f));
    frame.intrinsics = spec.intrinsics;
    const int n = std::uniform_int_distribution<int>(spec.min_objects,
                                                     spec.max_objects)(rng);
    for (int i = 0; i < n; ++i) {
      auto [label, box] = sampler.Sample(rng);
      box.Validate();
      frame.objects.push_back({frame.frame_id, std::move(label), box, {}});
    }
  });
  return scene;
}

std::vector<Detection> Perturb(const Scene& scene, const PerturbModel& model,
                               int threads) {
  model.Validate();
  std::vector<std::vector<Detection>> per_frame(scene.frames.size());
  internal::ParallelFor(scene.frames.size(), threads, [&](size_t f) {
    const SceneFrame& frame = scene.frames[f];
    std::vector<Detection>& out = per_frame[f];

    // Every GT consumes the same draws whatever the noise levels, so runs
    // that differ only in a sigma share their standard-normal samples.
    std::mt19937_64 rng = Substream(model.seed, kNoiseStream, f);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (const GroundTruth& gt : frame.objects) {
      const bool missed = unit(rng) < model.p_miss;
      Vec3 dt;
      Vec3 ds;
      Vec3 dr;
      for (int i = 0; i < 3; ++i) dt[i] = normal(rng);
      for (int i = 0; i < 3; ++i) ds[i] = normal(rng);
      for (int i = 0; i < 3; ++i) dr[i] = normal(rng);
      if (missed) continue;

      Detection det;
      det.frame_id = gt.frame_id;
      det.label = gt.label;
      det.box3d.center = gt.box3d.center + model.sigma_t * dt;
      det.box3d.dims =
          gt.box3d.dims.array() * (model.sigma_s * ds).array().exp();
      det.box3d.rotation =
          Rotation::FromRotationVector(model.sigma_r * dr) * gt.box3d.rotation;
      if (model.sigma_t > 0.0) {
        const double err = (det.box3d.center - gt.box3d.center).norm();
        det.score = std::clamp(std::exp(-err / model.sigma_t), 0.0, 1.0);
      } else {
        det.score = 0.5;
      }
      out.push_back(std::move(det));
    }

    if (model.fp_rate > 0.0) {
      std::mt19937_64 fp_rng = Substream(model.seed, kFalsePositiveStream, f);
      ObjectSampler sampler(scene.spec);
      const int n_fp =
          std::poisson_distribution<int>(model.fp_rate)(fp_rng);
      for (int i = 0; i < n_fp; ++i) {
        auto [label, box] = sampler.Sample(fp_rng);
        Detection det;
        det.frame_id = frame.frame_id;
        det.label = std::move(label);
        det.box3d = box;
        det.score = unit(fp_rng);
        out.push_back(std::move(det));
      }
    }
  });
  std::vector<Detection> all;
  for (auto& v : per_frame) {
    for (auto& d : v) all.push_back(std::move(d));
  }
  return all;
}

SceneSpec FixedSizeScene(const std::string& label, const Vec3& dims,
                         int n_frames, std::uint64_t seed) {
  SceneSpec spec;
  spec.n_frames = n_frames;
  spec.min_objects = 1;
  spec.max_objects = 5;
  spec.classes = {{label, dims.array().log().matrix(), Vec3::Zero(), 1.0}};
  spec.seed = seed;
  return spec;
}

}  // namespace mood3d
