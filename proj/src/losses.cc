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

#include "mood3d/losses.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mood3d/error.h"

namespace mood3d {

void LossWeights::Validate() const {
  if (!(w_2d >= 0.0) || !(w_3d >= 0.0) || !(lambda_depth >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "loss weights must be >= 0");
  }
  if (num_decoder_layers && *num_decoder_layers <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "layer count must be positive");
  }
}

double L13d(const LiftParams& pred, const LiftParams& target) {
  return (pred.ToVector() - target.ToVector()).cwiseAbs().sum();
}

double Giou2d(const Box2D& a, const Box2D& b) {
  a.Validate();
  b.Validate();
  const double iw = std::max(0.0, std::min(a.x2, b.x2) - std::max(a.x1, b.x1));
  const double ih = std::max(0.0, std::min(a.y2, b.y2) - std::max(a.y1, b.y1));
  const double inter = iw * ih;
  const double uni = a.Area() + b.Area() - inter;
  const double hull = (std::max(a.x2, b.x2) - std::min(a.x1, b.x1)) *
                      (std::max(a.y2, b.y2) - std::min(a.y1, b.y1));
  if (!(hull > 0.0)) {
    throw Error(ErrorCode::kDegenerateBox, "enclosing box has zero area");
  }
  const double iou = uni > 0.0 ? inter / uni : 0.0;
  return iou - (hull - uni) / hull;
}

double Silog(std::span<const double> pred_depth,
             std::span<const double> gt_depth, const std::vector<bool>& valid_mask,
             double lambda_si) {
  if (pred_depth.size() != gt_depth.size() ||
      (!valid_mask.empty() && valid_mask.size() != pred_depth.size())) {
    throw Error(ErrorCode::kLengthMismatch, "depth maps differ in size");
  }
  double sum = 0.0;
  double sum_sq = 0.0;
  size_t n = 0;
  for (size_t i = 0; i < pred_depth.size(); ++i) {
    if (!valid_mask.empty() && !valid_mask[i]) continue;
    if (!(pred_depth[i] > 0.0) || !(gt_depth[i] > 0.0)) {
      throw Error(ErrorCode::kNonPositiveDepth,
                  "depth at pixel " + std::to_string(i) + " is not positive");
    }
    const double g = std::log(pred_depth[i]) - std::log(gt_depth[i]);
    sum += g;
    sum_sq += g * g;
    ++n;
  }
  if (n == 0) throw Error(ErrorCode::kEmptyMask, "no valid pixels");
  const double mean = sum / n;
  return sum_sq / n - lambda_si * mean * mean;
}

double FinalLoss(std::span<const double> per_layer_2d,
                 std::span<const double> per_layer_3d, double depth_loss,
                 const LossWeights& w) {
  w.Validate();
  if (per_layer_2d.size() != per_layer_3d.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "2D and 3D loss lists have different lengths");
  }
  if (w.num_decoder_layers &&
      per_layer_2d.size() != static_cast<size_t>(*w.num_decoder_layers)) {
    throw Error(ErrorCode::kLengthMismatch,
                "expected " + std::to_string(*w.num_decoder_layers) +
                    " per-layer losses, got " +
                    std::to_string(per_layer_2d.size()));
  }
  const double sum_2d =
      std::accumulate(per_layer_2d.begin(), per_layer_2d.end(), 0.0);
  const double sum_3d =
      std::accumulate(per_layer_3d.begin(), per_layer_3d.end(), 0.0);
  return w.w_2d * sum_2d + w.w_3d * sum_3d + w.lambda_depth * depth_loss;
}

}  // namespace mood3d
