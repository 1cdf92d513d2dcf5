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

// Reference values for the detector's training objectives.

#ifndef MOOD3D_LOSSES_H_
#define MOOD3D_LOSSES_H_

#include <optional>
#include <span>
#include <vector>

#include "mood3d/geometry.h"
#include "mood3d/lifting.h"

namespace mood3d {

struct LossWeights {
  double w_2d = 1.0;
  double w_3d = 1.0;
  double lambda_depth = 10.0;
  // When set, both per-layer lists must have exactly this many entries.
  std::optional<int> num_decoder_layers;

  void Validate() const;
};

// Sum of absolute differences over the twelve encoded head outputs.
double L13d(const LiftParams& pred, const LiftParams& target);

// Generalized IoU in (-1, 1].
double Giou2d(const Box2D& a, const Box2D& b);

// Scale-invariant log loss over pixels with mask[i] set:
//   mean(g^2) - lambda_si * mean(g)^2,  g = log(pred) - log(gt).
// An empty mask span means every pixel is valid.
double Silog(std::span<const double> pred_depth,
             std::span<const double> gt_depth, const std::vector<bool>& valid_mask,
             double lambda_si = 0.5);

double FinalLoss(std::span<const double> per_layer_2d,
                 std::span<const double> per_layer_3d, double depth_loss,
                 const LossWeights& w = {});

}  // namespace mood3d

#endif  // MOOD3D_LOSSES_H_
