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

#include "mood3d/metrics.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <utility>

#include <Eigen/Core>

#include "mood3d/error.h"
#include "parallel.h"

namespace mood3d {
namespace {

// Returns the GT index claimed by each detection, or -1.
std::vector<int> GreedyAssign(const std::vector<size_t>& order,
                              const Eigen::MatrixXd& affinity,
                              bool higher_is_better,
                              const std::vector<double>& limit) {
  const int n_gt = static_cast<int>(affinity.cols());
  std::vector<int> assigned(affinity.rows(), -1);
  std::vector<bool> taken(n_gt, false);
  for (size_t d : order) {
    int best = -1;
    for (int g = 0; g < n_gt; ++g) {
      if (taken[g]) continue;
      const double a = affinity(d, g);
      const bool passes = higher_is_better ? a >= limit[g] : a <= limit[g];
      if (!passes) continue;
      if (best < 0 || (higher_is_better ? a > affinity(d, best)
                                        : a < affinity(d, best))) {
        best = g;
      }
    }
    if (best >= 0) {
      taken[best] = true;
      assigned[d] = best;
    }
  }
  return assigned;
}

// Everything about one (class, frame) cell that does not depend on the
// threshold.
struct FrameCell {
  std::string frame_id;
  std::vector<const Detection*> dets;
  std::vector<const GroundTruth*> gts;
  std::vector<size_t> order;
  Eigen::MatrixXd iou;
  Eigen::MatrixXd distance;
  std::vector<double> radius;
};

FrameCell MakeCell(std::string frame_id, std::vector<const Detection*> dets,
                   std::vector<const GroundTruth*> gts, RadiusMode mode) {
  FrameCell cell;
  cell.frame_id = std::move(frame_id);
  cell.order.resize(dets.size());
  for (size_t i = 0; i < dets.size(); ++i) cell.order[i] = i;
  std::stable_sort(cell.order.begin(), cell.order.end(),
                   [&](size_t l, size_t r) {
                     return dets[l]->score > dets[r]->score;
                   });
  cell.iou.resize(dets.size(), gts.size());
  cell.distance.resize(dets.size(), gts.size());
  cell.radius.resize(gts.size());
  for (size_t g = 0; g < gts.size(); ++g) {
    cell.radius[g] = GtRadius(gts[g]->box3d, mode);
  }
  for (size_t d = 0; d < dets.size(); ++d) {
    for (size_t g = 0; g < gts.size(); ++g) {
      cell.iou(d, g) = Iou3d(dets[d]->box3d, gts[g]->box3d);
      cell.distance(d, g) = CenterDistance(dets[d]->box3d, gts[g]->box3d);
    }
  }
  cell.dets = std::move(dets);
  cell.gts = std::move(gts);
  return cell;
}

std::vector<int> MatchCell(const FrameCell& cell,
                           const MatchCriterion& criterion) {
  if (criterion.kind == MatchCriterion::Kind::kIou) {
    return GreedyAssign(cell.order, cell.iou, true,
                        std::vector<double>(cell.gts.size(),
                                            criterion.threshold));
  }
  std::vector<double> limit(cell.gts.size());
  for (size_t g = 0; g < limit.size(); ++g) {
    limit[g] = criterion.threshold * cell.radius[g];
  }
  return GreedyAssign(cell.order, cell.distance, false, limit);
}

// Pools one class's matches over frames. Cells are in frame-id order, so the
// ranking is score descending, then frame id, then index within the frame.
double ClassAp(const std::vector<FrameCell>& cells,
               const MatchCriterion& criterion, int n_gt,
               const MetricConfig& cfg) {
  std::vector<ScoredOutcome> outcomes;
  for (const FrameCell& cell : cells) {
    const std::vector<int> assigned = MatchCell(cell, criterion);
    for (size_t d = 0; d < cell.dets.size(); ++d) {
      outcomes.push_back({cell.dets[d]->score, assigned[d] >= 0});
    }
  }
  std::stable_sort(outcomes.begin(), outcomes.end(),
                   [](const ScoredOutcome& l, const ScoredOutcome& r) {
                     return l.score > r.score;
                   });
  return AveragePrecision(BuildPrCurve(outcomes, n_gt), cfg.ap_integration,
                          cfg.recall_points);
}

ClassMetrics EvaluateOneClass(const std::string& label,
                              const std::vector<FrameCell>& cells,
                              const MetricConfig& cfg) {
  ClassMetrics m;
  m.label = label;
  for (const FrameCell& cell : cells) {
    m.num_ground_truth += static_cast<int>(cell.gts.size());
    m.num_detections += static_cast<int>(cell.dets.size());
  }
  for (double tau : cfg.iou_thresholds) {
    m.ap_iou_per_threshold.push_back(
        ClassAp(cells, MatchCriterion::Iou(tau), m.num_ground_truth, cfg));
  }
  for (double ratio : cfg.dist_ratio_thresholds) {
    m.ap_dist_per_threshold.push_back(
        ClassAp(cells, MatchCriterion::Distance(ratio, cfg.radius_mode),
                m.num_ground_truth, cfg));
  }
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
  };
  m.ap_iou = mean(m.ap_iou_per_threshold);
  m.ap_dist = mean(m.ap_dist_per_threshold);

  const double tp_ratio = cfg.tp_error_threshold_ratio;
  std::vector<TpError> errors;
  for (const FrameCell& cell : cells) {
    const std::vector<int> assigned =
        MatchCell(cell, MatchCriterion::Distance(tp_ratio, cfg.radius_mode));
    for (size_t d = 0; d < cell.dets.size(); ++d) {
      if (assigned[d] < 0) continue;
      errors.push_back(ComputeTpError(cell.dets[d]->box3d,
                                      cell.gts[assigned[d]]->box3d, tp_ratio,
                                      cfg.radius_mode));
    }
  }
  m.true_positives = static_cast<int>(errors.size());
  m.false_positives = m.num_detections - m.true_positives;
  m.false_negatives = m.num_ground_truth - m.true_positives;
  m.tp_error = MeanTpError(errors);
  return m;
}

void CheckThresholds(const std::vector<double>& t, double lo, bool lo_open,
                     const char* name) {
  if (t.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(name) + " must not be empty");
  }
  for (size_t i = 0; i < t.size(); ++i) {
    const bool above = lo_open ? t[i] > lo : t[i] >= lo;
    if (!std::isfinite(t[i]) || !above || t[i] > 1.0) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string(name) + " must lie in (0, 1]");
    }
    if (i > 0 && !(t[i] > t[i - 1])) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string(name) + " must be strictly increasing");
    }
  }
}

template <typename T>
void ValidateAll(std::span<const T> items, const char* what) {
  for (size_t i = 0; i < items.size(); ++i) {
    try {
      items[i].Validate();
    } catch (const Error& e) {
      throw Error(ErrorCode::kInvariantViolation,
                  std::string(what) + " " + std::to_string(i) + ": " +
                      e.what());
    }
  }
}

std::optional<SplitScore> SummarizeSubset(
    const std::vector<ClassMetrics>& classes,
    const std::optional<std::vector<std::string>>& labels) {
  if (!labels) return std::nullopt;
  const std::set<std::string> wanted(labels->begin(), labels->end());
  std::vector<ClassMetrics> subset;
  for (const ClassMetrics& c : classes) {
    if (wanted.count(c.label)) subset.push_back(c);
  }
  if (subset.empty()) return std::nullopt;
  return Summarize(subset);
}

}  // namespace

void Detection::Validate() const {
  if (!std::isfinite(score) || score < 0.0 || score > 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "score must lie in [0, 1]");
  }
  box3d.Validate();
  if (box2d) box2d->Validate();
}

void GroundTruth::Validate() const {
  box3d.Validate();
  if (box2d) box2d->Validate();
}

FrameMatch MatchFrame(std::span<const Detection> dets,
                      std::span<const GroundTruth> gts,
                      const MatchCriterion& criterion) {
  std::optional<std::pair<std::string, std::string>> key;
  auto check = [&](const std::string& frame, const std::string& label) {
    if (!key) {
      key.emplace(frame, label);
    } else if (key->first != frame || key->second != label) {
      throw Error(ErrorCode::kMixedFrames,
                  "inputs span more than one frame or class");
    }
  };
  for (const Detection& d : dets) check(d.frame_id, d.label);
  for (const GroundTruth& g : gts) check(g.frame_id, g.label);

  std::vector<const Detection*> det_ptrs;
  std::vector<const GroundTruth*> gt_ptrs;
  for (const Detection& d : dets) det_ptrs.push_back(&d);
  for (const GroundTruth& g : gts) gt_ptrs.push_back(&g);
  const FrameCell cell = MakeCell(key ? key->first : std::string(), det_ptrs,
                                  gt_ptrs, criterion.radius_mode);
  const std::vector<int> assigned = MatchCell(cell, criterion);

  FrameMatch out;
  std::vector<bool> gt_used(gts.size(), false);
  for (size_t d : cell.order) {
    if (assigned[d] >= 0) {
      out.pairs.emplace_back(d, static_cast<size_t>(assigned[d]));
      gt_used[assigned[d]] = true;
    }
  }
  for (size_t d = 0; d < dets.size(); ++d) {
    if (assigned[d] < 0) out.unmatched_detections.push_back(d);
  }
  for (size_t g = 0; g < gts.size(); ++g) {
    if (!gt_used[g]) out.unmatched_ground_truth.push_back(g);
  }
  return out;
}

PrCurve BuildPrCurve(std::span<const ScoredOutcome> outcomes,
                     int num_ground_truth) {
  if (num_ground_truth <= 0) {
    throw Error(ErrorCode::kNoGroundTruth, "class has no ground truth");
  }
  PrCurve curve;
  curve.num_ground_truth = num_ground_truth;
  int tp = 0;
  int fp = 0;
  for (const ScoredOutcome& o : outcomes) {
    if (o.true_positive) {
      ++tp;
    } else {
      ++fp;
    }
    curve.precision.push_back(static_cast<double>(tp) / (tp + fp));
    curve.recall.push_back(static_cast<double>(tp) / num_ground_truth);
  }
  return curve;
}

double AveragePrecision(const PrCurve& curve, ApIntegration mode,
                        int recall_points) {
  const size_t n = curve.precision.size();
  if (n == 0) return 0.0;
  if (mode == ApIntegration::kTrapezoid) {
    double area = 0.0;
    double prev_r = 0.0;
    double prev_p = curve.precision.front();
    for (size_t i = 0; i < n; ++i) {
      area += (curve.recall[i] - prev_r) * 0.5 * (curve.precision[i] + prev_p);
      prev_r = curve.recall[i];
      prev_p = curve.precision[i];
    }
    return std::clamp(area, 0.0, 1.0);
  }
  if (recall_points < 2) {
    throw Error(ErrorCode::kInvalidArgument, "need at least 2 recall points");
  }
  std::vector<double> envelope = curve.precision;
  for (size_t i = n - 1; i-- > 0;) {
    envelope[i] = std::max(envelope[i], envelope[i + 1]);
  }
  double sum = 0.0;
  for (int k = 0; k < recall_points; ++k) {
    const double r = static_cast<double>(k) / (recall_points - 1);
    const auto it =
        std::lower_bound(curve.recall.begin(), curve.recall.end(), r);
    if (it != curve.recall.end()) sum += envelope[it - curve.recall.begin()];
  }
  return sum / recall_points;
}

std::vector<double> MetricConfig::DefaultIouThresholds() {
  std::vector<double> t;
  for (int k = 1; k <= 10; ++k) t.push_back(5.0 * k / 100.0);
  return t;
}

std::vector<double> MetricConfig::DefaultDistRatioThresholds() {
  std::vector<double> t;
  for (int k = 0; k <= 10; ++k) t.push_back((50.0 + 5.0 * k) / 100.0);
  return t;
}

void MetricConfig::Validate() const {
  CheckThresholds(iou_thresholds, 0.0, false, "iou_thresholds");
  CheckThresholds(dist_ratio_thresholds, 0.0, true, "dist_ratio_thresholds");
  if (!(tp_error_threshold_ratio > 0.0) || tp_error_threshold_ratio > 1.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "tp_error_threshold_ratio must lie in (0, 1]");
  }
  if (recall_points < 2) {
    throw Error(ErrorCode::kInvalidArgument, "recall_points must be >= 2");
  }
}

TpError ComputeTpError(const Box3D& pred, const Box3D& gt, double ratio,
                       RadiusMode mode) {
  TpError e;
  const double normalizer = ratio * GtRadius(gt, mode);
  e.ate = std::min(1.0, CenterDistance(pred, gt) / normalizer);
  Box3D aligned = gt;
  aligned.dims = pred.dims;
  e.ase = std::clamp(1.0 - Iou3d(aligned, gt), 0.0, 1.0);
  e.aoe = std::clamp(GeodesicAngle(pred.rotation, gt.rotation) /
                         std::numbers::pi,
                     0.0, 1.0);
  return e;
}

TpError MeanTpError(std::span<const TpError> pairs) {
  if (pairs.empty()) return {1.0, 1.0, 1.0};
  TpError sum;
  for (const TpError& e : pairs) {
    sum.ate += e.ate;
    sum.ase += e.ase;
    sum.aoe += e.aoe;
  }
  const double n = static_cast<double>(pairs.size());
  return {sum.ate / n, sum.ase / n, sum.aoe / n};
}

double Ods(double ap_dist, double mate, double mase, double maoe) {
  for (double v : {ap_dist, mate, mase, maoe}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorCode::kOutOfRange, "ODS inputs must lie in [0, 1]");
    }
  }
  return (3.0 * ap_dist + (1.0 - mate) + (1.0 - mase) + (1.0 - maoe)) / 6.0;
}

std::vector<ClassMetrics> EvaluateClasses(std::span<const GroundTruth> gts,
                                          std::span<const Detection> dets,
                                          const MetricConfig& cfg,
                                          int threads) {
  cfg.Validate();
  ValidateAll(gts, "ground truth");
  ValidateAll(dets, "detection");

  // label -> frame -> items, all in input order.
  std::map<std::string, std::map<std::string, std::vector<const GroundTruth*>>>
      gt_cells;
  std::map<std::string, std::map<std::string, std::vector<const Detection*>>>
      det_cells;
  for (const GroundTruth& g : gts) gt_cells[g.label][g.frame_id].push_back(&g);
  for (const Detection& d : dets) {
    if (gt_cells.count(d.label)) det_cells[d.label][d.frame_id].push_back(&d);
  }

  std::vector<std::string> labels;
  for (const auto& entry : gt_cells) labels.push_back(entry.first);
  std::vector<ClassMetrics> results(labels.size());

  auto run = [&](size_t i) {
    const std::string& label = labels[i];
    const auto& label_gts = std::as_const(gt_cells).at(label);
    std::set<std::string> frames;
    for (const auto& f : label_gts) frames.insert(f.first);
    const auto det_it = std::as_const(det_cells).find(label);
    if (det_it != std::as_const(det_cells).end()) {
      for (const auto& f : det_it->second) frames.insert(f.first);
    }
    std::vector<FrameCell> cells;
    for (const std::string& frame : frames) {
      std::vector<const GroundTruth*> cell_gts;
      std::vector<const Detection*> cell_dets;
      if (auto it = label_gts.find(frame); it != label_gts.end()) {
        cell_gts = it->second;
      }
      if (det_it != std::as_const(det_cells).end()) {
        if (auto it = det_it->second.find(frame); it != det_it->second.end()) {
          cell_dets = it->second;
        }
      }
      cells.push_back(MakeCell(frame, std::move(cell_dets), std::move(cell_gts),
                               cfg.radius_mode));
    }
    results[i] = EvaluateOneClass(label, cells, cfg);
  };

  internal::ParallelFor(labels.size(), threads, run);
  return results;
}

SplitScore Summarize(std::span<const ClassMetrics> classes) {
  SplitScore s;
  s.num_classes = static_cast<int>(classes.size());
  if (classes.empty()) return s;
  s.mate = s.mase = s.maoe = 0.0;
  for (const ClassMetrics& c : classes) {
    s.ap_iou += c.ap_iou;
    s.ap_dist += c.ap_dist;
    s.mate += c.tp_error.ate;
    s.mase += c.tp_error.ase;
    s.maoe += c.tp_error.aoe;
  }
  const double n = static_cast<double>(classes.size());
  s.ap_iou /= n;
  s.ap_dist /= n;
  s.mate /= n;
  s.mase /= n;
  s.maoe /= n;
  s.ods = Ods(s.ap_dist, s.mate, s.mase, s.maoe);
  return s;
}

double ApIou(std::span<const GroundTruth> gts, std::span<const Detection> dets,
             const MetricConfig& cfg) {
  return Summarize(EvaluateClasses(gts, dets, cfg)).ap_iou;
}

double ApDist(std::span<const GroundTruth> gts, std::span<const Detection> dets,
              const MetricConfig& cfg) {
  return Summarize(EvaluateClasses(gts, dets, cfg)).ap_dist;
}

MetricReport Evaluate(std::span<const GroundTruth> gts,
                      std::span<const Detection> dets, const MetricConfig& cfg,
                      int threads) {
  if (gts.empty()) {
    throw Error(ErrorCode::kEmptyGroundTruth, "no ground-truth boxes");
  }
  MetricReport report;
  report.classes = EvaluateClasses(gts, dets, cfg, threads);
  report.overall = Summarize(report.classes);
  report.base = SummarizeSubset(report.classes, cfg.base_classes);
  report.novel = SummarizeSubset(report.classes, cfg.novel_classes);
  std::set<std::string> frames;
  for (const GroundTruth& g : gts) frames.insert(g.frame_id);
  for (const Detection& d : dets) frames.insert(d.frame_id);
  report.num_frames = static_cast<int>(frames.size());
  for (const ClassMetrics& c : report.classes) {
    report.true_positives += c.true_positives;
    report.false_positives += c.false_positives;
    report.false_negatives += c.false_negatives;
  }
  return report;
}

std::vector<MatchingGap> CompareMatching(const MetricReport& report) {
  std::vector<MatchingGap> rows;
  for (const ClassMetrics& c : report.classes) {
    rows.push_back({c.label, c.ap_iou, c.ap_dist, c.ap_dist - c.ap_iou});
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const MatchingGap& l, const MatchingGap& r) {
                     if (l.gap != r.gap) return l.gap > r.gap;
                     return l.label < r.label;
                   });
  return rows;
}

}  // namespace mood3d
