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

// Detection evaluation: IoU-threshold 3D AP, center-distance 3D AP with
// radius-normalized thresholds, true-positive errors and the aggregate
// open detection score (ODS).

#ifndef MOOD3D_METRICS_H_
#define MOOD3D_METRICS_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mood3d/geometry.h"

namespace mood3d {

struct Detection {
  std::string frame_id;
  std::string label;
  double score = 0.0;
  Box3D box3d;
  std::optional<Box2D> box2d;

  void Validate() const;
};

struct GroundTruth {
  std::string frame_id;
  std::string label;
  Box3D box3d;
  std::optional<Box2D> box2d;

  void Validate() const;
};

struct MatchCriterion {
  enum class Kind { kIou, kDistance };

  Kind kind = Kind::kIou;
  // IoU threshold, or fraction of the GT radius for kDistance.
  double threshold = 0.5;
  RadiusMode radius_mode = RadiusMode::kCircumscribed;

  static MatchCriterion Iou(double tau) { return {Kind::kIou, tau}; }
  static MatchCriterion Distance(
      double ratio, RadiusMode mode = RadiusMode::kCircumscribed) {
    return {Kind::kDistance, ratio, mode};
  }
};

struct FrameMatch {
  // (detection index, GT index), in the order detections claimed them.
  std::vector<std::pair<size_t, size_t>> pairs;
  std::vector<size_t> unmatched_detections;
  std::vector<size_t> unmatched_ground_truth;
};

// Greedy matching within one frame and one class. Detections are visited by
// descending score (ties: lower input index first); each takes the unmatched
// GT with the best affinity that passes the criterion (ties: lower GT index).
// IoU passes when iou >= threshold; distance passes when
// center_distance <= threshold * radius(gt).
FrameMatch MatchFrame(std::span<const Detection> dets,
                      std::span<const GroundTruth> gts,
                      const MatchCriterion& criterion);

enum class ApIntegration {
  kInterpolated,  // N-point interpolated precision (COCO style)
  kTrapezoid,     // raw trapezoid rule under the PR samples
};

struct ScoredOutcome {
  double score = 0.0;
  bool true_positive = false;
};

struct PrCurve {
  std::vector<double> precision;
  std::vector<double> recall;
  int num_ground_truth = 0;
};

// `outcomes` must already be in ranking order (best first).
PrCurve BuildPrCurve(std::span<const ScoredOutcome> outcomes,
                     int num_ground_truth);
double AveragePrecision(const PrCurve& curve,
                        ApIntegration mode = ApIntegration::kInterpolated,
                        int recall_points = 101);

struct MetricConfig {
  std::vector<double> iou_thresholds = DefaultIouThresholds();
  std::vector<double> dist_ratio_thresholds = DefaultDistRatioThresholds();
  double tp_error_threshold_ratio = 1.0;
  int recall_points = 101;
  ApIntegration ap_integration = ApIntegration::kInterpolated;
  RadiusMode radius_mode = RadiusMode::kCircumscribed;
  std::optional<std::vector<std::string>> base_classes;
  std::optional<std::vector<std::string>> novel_classes;

  // 0.05, 0.10, ..., 0.50
  static std::vector<double> DefaultIouThresholds();
  // 0.50, 0.55, ..., 1.00
  static std::vector<double> DefaultDistRatioThresholds();

  void Validate() const;
};

struct TpError {
  double ate = 0.0;
  double ase = 0.0;
  double aoe = 0.0;
};

// Errors of one matched pair; `ratio` is the matching ratio that admitted it.
TpError ComputeTpError(const Box3D& pred, const Box3D& gt, double ratio,
                       RadiusMode mode = RadiusMode::kCircumscribed);

// Mean errors over a class's matched pairs; a class without matches scores
// 1.0 on every error.
TpError MeanTpError(std::span<const TpError> pairs);

// (3 * ap_dist + (1 - mATE) + (1 - mASE) + (1 - mAOE)) / 6. Inputs must lie in
// [0, 1].
double Ods(double ap_dist, double mate, double mase, double maoe);

struct ClassMetrics {
  std::string label;
  int num_ground_truth = 0;
  int num_detections = 0;
  std::vector<double> ap_iou_per_threshold;
  std::vector<double> ap_dist_per_threshold;
  double ap_iou = 0.0;
  double ap_dist = 0.0;
  // Counts and errors at tp_error_threshold_ratio.
  int true_positives = 0;
  int false_positives = 0;
  int false_negatives = 0;
  TpError tp_error{1.0, 1.0, 1.0};
};

struct SplitScore {
  int num_classes = 0;
  double ap_iou = 0.0;
  double ap_dist = 0.0;
  double mate = 1.0;
  double mase = 1.0;
  double maoe = 1.0;
  double ods = 0.0;
};

struct MetricReport {
  // Sorted by label.
  std::vector<ClassMetrics> classes;
  SplitScore overall;
  std::optional<SplitScore> base;
  std::optional<SplitScore> novel;
  int num_frames = 0;
  int true_positives = 0;
  int false_positives = 0;
  int false_negatives = 0;
};

// Per-class metrics for every label present in the ground truth. Classes are
// evaluated on up to `threads` workers; the result does not depend on it.
std::vector<ClassMetrics> EvaluateClasses(std::span<const GroundTruth> gts,
                                          std::span<const Detection> dets,
                                          const MetricConfig& cfg,
                                          int threads = 1);

// Unweighted mean over the given classes.
SplitScore Summarize(std::span<const ClassMetrics> classes);

double ApIou(std::span<const GroundTruth> gts, std::span<const Detection> dets,
             const MetricConfig& cfg = {});
double ApDist(std::span<const GroundTruth> gts, std::span<const Detection> dets,
              const MetricConfig& cfg = {});

// Throws Error(kEmptyGroundTruth) when `gts` is empty.
MetricReport Evaluate(std::span<const GroundTruth> gts,
                      std::span<const Detection> dets,
                      const MetricConfig& cfg = {}, int threads = 1);

struct MatchingGap {
  std::string label;
  double ap_iou = 0.0;
  double ap_dist = 0.0;
  double gap = 0.0;  // ap_dist - ap_iou
};

// Sorted by gap, largest first; ties by label.
std::vector<MatchingGap> CompareMatching(const MetricReport& report);

}  // namespace mood3d

#endif  // MOOD3D_METRICS_H_
