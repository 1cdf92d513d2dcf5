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
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "mood3d/error.h"
#include "mood3d/synth.h"
#include "oracles.h"

namespace mood3d {
namespace {

Box3D BoxAt(const Vec3& center, const Vec3& dims = Vec3::Ones()) {
  return {center, dims, Rotation::Identity()};
}

GroundTruth Gt(const std::string& frame, const Box3D& box,
               const std::string& label = "car") {
  return {frame, label, box, std::nullopt};
}

Detection Det(const std::string& frame, double score, const Box3D& box,
              const std::string& label = "car") {
  return {frame, label, score, box, std::nullopt};
}

std::vector<MatchCriterion> AllCriteria() {
  std::vector<MatchCriterion> out;
  for (double t : MetricConfig::DefaultIouThresholds()) {
    out.push_back(MatchCriterion::Iou(t));
  }
  for (double r : MetricConfig::DefaultDistRatioThresholds()) {
    out.push_back(MatchCriterion::Distance(r));
  }
  return out;
}

TEST(ThresholdsTest, Defaults) {
  const auto iou = MetricConfig::DefaultIouThresholds();
  ASSERT_EQ(iou.size(), 10u);
  EXPECT_EQ(iou.front(), 0.05);
  EXPECT_EQ(iou.back(), 0.5);
  const auto dist = MetricConfig::DefaultDistRatioThresholds();
  ASSERT_EQ(dist.size(), 11u);
  EXPECT_EQ(dist.front(), 0.5);
  EXPECT_EQ(dist[5], 0.75);
  EXPECT_EQ(dist.back(), 1.0);
}

TEST(MatchFrameTest, ExactHitUnderEveryCriterion) {
  const std::vector<GroundTruth> gts{Gt("f", BoxAt({0, 0, 10}))};
  const std::vector<Detection> dets{Det("f", 0.9, BoxAt({0, 0, 10}))};
  for (const auto& c : AllCriteria()) {
    const FrameMatch m = MatchFrame(dets, gts, c);
    ASSERT_EQ(m.pairs.size(), 1u);
    EXPECT_TRUE(m.unmatched_detections.empty());
    EXPECT_TRUE(m.unmatched_ground_truth.empty());
  }
}

TEST(MatchFrameTest, HigherScoreClaimsFirst) {
  const std::vector<GroundTruth> gts{Gt("f", BoxAt({0, 0, 10}))};
  // The farther detection has the higher score and wins the only GT.
  const std::vector<Detection> dets{Det("f", 0.4, BoxAt({0.05, 0, 10})),
                                    Det("f", 0.8, BoxAt({0.3, 0, 10}))};
  for (const auto& c :
       {MatchCriterion::Iou(0.3), MatchCriterion::Distance(0.5)}) {
    const FrameMatch m = MatchFrame(dets, gts, c);
    ASSERT_EQ(m.pairs.size(), 1u);
    EXPECT_EQ(m.pairs[0].first, 1u);
    ASSERT_EQ(m.unmatched_detections.size(), 1u);
    EXPECT_EQ(m.unmatched_detections[0], 0u);
  }
}

TEST(MatchFrameTest, BestAffinityAmongUnclaimed) {
  const std::vector<GroundTruth> gts{Gt("f", BoxAt({0, 0, 10})),
                                     Gt("f", BoxAt({0.6, 0, 10}))};
  const std::vector<Detection> dets{Det("f", 0.9, BoxAt({0.5, 0, 10}))};
  const FrameMatch m = MatchFrame(dets, gts, MatchCriterion::Distance(1.0));
  ASSERT_EQ(m.pairs.size(), 1u);
  EXPECT_EQ(m.pairs[0].second, 1u);
}

TEST(MatchFrameTest, RejectsMixedInputs) {
  const std::vector<GroundTruth> gts{Gt("f", BoxAt({0, 0, 10})),
                                     Gt("g", BoxAt({0, 0, 10}))};
  const std::vector<Detection> dets;
  try {
    MatchFrame(dets, gts, MatchCriterion::Iou(0.5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMixedFrames);
  }
  const std::vector<GroundTruth> one{Gt("f", BoxAt({0, 0, 10}))};
  const std::vector<Detection> other{
      Det("f", 0.5, BoxAt({0, 0, 10}), "truck")};
  EXPECT_THROW(MatchFrame(other, one, MatchCriterion::Iou(0.5)), Error);
}

// Small random frames where near-ties are common.
void RandomInstance(std::mt19937_64& rng, std::vector<Detection>* dets,
                    std::vector<GroundTruth>* gts) {
  std::uniform_int_distribution<int> count(0, 5);
  std::uniform_int_distribution<int> grid(0, 4);
  std::uniform_int_distribution<int> score(1, 4);
  std::uniform_real_distribution<double> dim(0.6, 1.6);
  auto place = [&] {
    return Vec3(0.25 * grid(rng), 0.25 * grid(rng), 10.0 + 0.25 * grid(rng));
  };
  dets->clear();
  gts->clear();
  const int ng = count(rng), nd = count(rng);
  for (int i = 0; i < ng; ++i) {
    gts->push_back(Gt("f", BoxAt(place(), Vec3(dim(rng), dim(rng), dim(rng)))));
  }
  for (int i = 0; i < nd; ++i) {
    dets->push_back(Det("f", 0.25 * score(rng),
                        BoxAt(place(), Vec3(dim(rng), dim(rng), dim(rng)))));
  }
}

TEST(MatchFrameTest, AgreesWithExhaustiveOracle) {
  std::mt19937_64 rng(77);
  const std::vector<MatchCriterion> criteria{
      MatchCriterion::Iou(0.1), MatchCriterion::Iou(0.3),
      MatchCriterion::Distance(0.5), MatchCriterion::Distance(1.0)};
  std::vector<Detection> dets;
  std::vector<GroundTruth> gts;
  for (int i = 0; i < 300; ++i) {
    RandomInstance(rng, &dets, &gts);
    const MatchCriterion& c = criteria[i % criteria.size()];
    const FrameMatch m = MatchFrame(dets, gts, c);
    const testing::MatchCounts oracle = testing::BruteForceGreedy(dets, gts, c);
    ASSERT_GE(oracle.tp, 0);
    ASSERT_EQ(int(m.pairs.size()), oracle.tp);
    ASSERT_EQ(int(m.unmatched_detections.size()), oracle.fp);
    ASSERT_EQ(int(m.unmatched_ground_truth.size()), oracle.fn);
    for (const auto& [d, g] : m.pairs) {
      ASSERT_EQ(oracle.assignment[d], int(g));
    }
    ASSERT_LE(oracle.tp, testing::MaxMatching(dets, gts, c));
  }
}

TEST(PrCurveTest, SingleHit) {
  const std::vector<ScoredOutcome> o{{0.9, true}};
  const PrCurve curve = BuildPrCurve(o, 1);
  EXPECT_EQ(curve.recall.back(), 1.0);
  EXPECT_EQ(curve.precision.back(), 1.0);
  EXPECT_EQ(AveragePrecision(curve), 1.0);
}

TEST(PrCurveTest, NoDetections) {
  EXPECT_EQ(AveragePrecision(BuildPrCurve({}, 3)), 0.0);
}

TEST(PrCurveTest, TrailingFalsePositiveIsFree) {
  const std::vector<ScoredOutcome> o{{0.9, true}, {0.1, false}};
  EXPECT_EQ(AveragePrecision(BuildPrCurve(o, 1)), 1.0);
}

TEST(PrCurveTest, LeadingFalsePositiveHalvesPrecision) {
  const std::vector<ScoredOutcome> o{{0.9, false}, {0.1, true}};
  EXPECT_DOUBLE_EQ(AveragePrecision(BuildPrCurve(o, 1)), 0.5);
}

TEST(PrCurveTest, HalfRecall) {
  // Recall 0.5 reached at precision 1: points 0..50 of 101 score 1.
  const std::vector<ScoredOutcome> o{{0.9, true}};
  EXPECT_DOUBLE_EQ(AveragePrecision(BuildPrCurve(o, 2)), 51.0 / 101.0);
}

TEST(PrCurveTest, RequiresGroundTruth) {
  try {
    BuildPrCurve({}, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoGroundTruth);
  }
}

TEST(PrCurveTest, MatchesReferenceAp) {
  std::mt19937_64 rng(31);
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<int> len(0, 40);
  for (int i = 0; i < 500; ++i) {
    const int n = len(rng);
    std::vector<ScoredOutcome> o;
    std::vector<bool> flags;
    int tps = 0;
    for (int k = 0; k < n; ++k) {
      const bool tp = coin(rng);
      tps += tp;
      o.push_back({1.0 - k / 64.0, tp});
      flags.push_back(tp);
    }
    const int n_gt = tps + len(rng) % 5 + (tps == 0);
    ASSERT_NEAR(AveragePrecision(BuildPrCurve(o, n_gt)),
                testing::ReferenceAp(flags, n_gt), 1e-12);
  }
}

TEST(TpErrorTest, Examples) {
  const Box3D gt = BoxAt({0, 0, 10});
  const TpError perfect = ComputeTpError(gt, gt, 1.0);
  EXPECT_EQ(perfect.ate, 0.0);
  EXPECT_EQ(perfect.ase, 0.0);
  EXPECT_EQ(perfect.aoe, 0.0);
  EXPECT_DOUBLE_EQ(
      ComputeTpError(BoxAt({0, 0, 10}, {1, 1, 2}), gt, 1.0).ase, 0.5);
  Box3D turned = gt;
  turned.rotation = Rotation::FromAxisAngle(Vec3::UnitZ(), std::numbers::pi / 2);
  EXPECT_NEAR(ComputeTpError(turned, gt, 1.0).aoe, 0.5, 1e-15);
  // ASE ignores the center and rotation of the prediction.
  Box3D moved = BoxAt({0.2, 0.1, 10}, {1, 1, 2});
  moved.rotation = turned.rotation;
  EXPECT_DOUBLE_EQ(ComputeTpError(moved, gt, 1.0).ase, 0.5);
  // ATE is normalized by ratio * radius.
  const Box3D gt2 = BoxAt({0, 0, 10}, {2, 2, 1});
  EXPECT_DOUBLE_EQ(ComputeTpError(BoxAt({0.75, 0, 10}), gt2, 1.0).ate, 0.5);
}

TEST(TpErrorTest, MeanOfNothingIsOne) {
  const TpError e = MeanTpError({});
  EXPECT_EQ(e.ate, 1.0);
  EXPECT_EQ(e.ase, 1.0);
  EXPECT_EQ(e.aoe, 1.0);
}

TEST(OdsTest, TableExamples) {
  EXPECT_NEAR(Ods(0.086, 0.903, 0.867, 0.953), 0.089, 5e-4);
  EXPECT_NEAR(Ods(0.147, 0.755, 0.680, 0.580), 0.238, 5e-4);
  EXPECT_EQ(Ods(1, 0, 0, 0), 1.0);
  EXPECT_EQ(Ods(0, 1, 1, 1), 0.0);
}

TEST(OdsTest, OutOfRange) {
  try {
    Ods(1.2, 0, 0, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOutOfRange);
  }
  EXPECT_THROW(Ods(0.5, -0.1, 0, 0), Error);
}

TEST(OdsTest, Monotone) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng), t = u(rng), s = u(rng), o = u(rng);
    const double base = Ods(a, t, s, o);
    ASSERT_GE(base, 0.0);
    ASSERT_LE(base, 1.0);
    const double bump = 0.5 * u(rng);
    ASSERT_GE(Ods(std::min(1.0, a + bump), t, s, o), base);
    ASSERT_LE(Ods(a, std::min(1.0, t + bump), s, o), base);
    ASSERT_LE(Ods(a, t, std::min(1.0, s + bump), o), base);
    ASSERT_LE(Ods(a, t, s, std::min(1.0, o + bump)), base);
  }
}

TEST(ApTest, PerfectAndEmpty) {
  const std::vector<GroundTruth> gts{Gt("a", BoxAt({0, 0, 10})),
                                     Gt("b", BoxAt({1, 0, 12}, {2, 4, 1.5}))};
  std::vector<Detection> dets;
  EXPECT_EQ(ApIou(gts, dets), 0.0);
  EXPECT_EQ(ApDist(gts, dets), 0.0);
  for (const auto& g : gts) dets.push_back(Det(g.frame_id, 0.9, g.box3d));
  EXPECT_EQ(ApIou(gts, dets), 1.0);
  EXPECT_EQ(ApDist(gts, dets), 1.0);
}

TEST(ApTest, DisplacedByThreeQuartersRadius) {
  // Radius of a 2x2x1 box is 1.5, so 1.125 m is exactly 0.75 radius: the
  // match holds at ratios 0.75, 0.80, ..., 1.00, six of eleven.
  const std::vector<GroundTruth> gts{Gt("a", BoxAt({0, 0, 10}, {2, 2, 1}))};
  const std::vector<Detection> dets{
      Det("a", 0.9, BoxAt({1.125, 0, 10}, {2, 2, 1}))};
  EXPECT_DOUBLE_EQ(ApDist(gts, dets), 6.0 / 11.0);
}

TEST(ApTest, MonotoneInThreshold) {
  SceneSpec spec = FixedSizeScene("box", Vec3(1, 2, 1.5), 20, 3);
  const Scene scene = Generate(spec);
  const auto gts = scene.AllGroundTruth();
  const auto dets = Perturb(scene, {0.3, 0.1, 0.1, 0.1, 0.5, 9});
  const auto classes = EvaluateClasses(gts, dets, {});
  ASSERT_EQ(classes.size(), 1u);
  const auto& c = classes[0];
  for (size_t i = 1; i < c.ap_iou_per_threshold.size(); ++i) {
    EXPECT_LE(c.ap_iou_per_threshold[i], c.ap_iou_per_threshold[i - 1]);
  }
  for (size_t i = 1; i < c.ap_dist_per_threshold.size(); ++i) {
    EXPECT_GE(c.ap_dist_per_threshold[i], c.ap_dist_per_threshold[i - 1]);
  }
}

TEST(EvaluateTest, PerfectRun) {
  SceneSpec spec;
  spec.n_frames = 8;
  spec.seed = 5;
  spec.classes = {{"car", Vec3(0.6, 1.5, 0.4), Vec3::Constant(0.1), 1.0},
                  {"chair", Vec3(-0.6, -0.6, 0.0), Vec3::Constant(0.1), 1.0}};
  const Scene scene = Generate(spec);
  const auto dets = Perturb(scene, {});
  MetricConfig cfg;
  cfg.base_classes = std::vector<std::string>{"car"};
  cfg.novel_classes = std::vector<std::string>{"chair"};
  const MetricReport r = Evaluate(scene.AllGroundTruth(), dets, cfg);
  EXPECT_EQ(r.overall.ap_iou, 1.0);
  EXPECT_EQ(r.overall.ap_dist, 1.0);
  EXPECT_EQ(r.overall.mate, 0.0);
  EXPECT_EQ(r.overall.mase, 0.0);
  EXPECT_EQ(r.overall.maoe, 0.0);
  EXPECT_EQ(r.overall.ods, 1.0);
  ASSERT_TRUE(r.base.has_value());
  ASSERT_TRUE(r.novel.has_value());
  EXPECT_EQ(r.base->ods, 1.0);
  EXPECT_EQ(r.novel->ods, 1.0);
  EXPECT_EQ(r.false_positives, 0);
  EXPECT_EQ(r.false_negatives, 0);
}

TEST(EvaluateTest, NoDetections) {
  const std::vector<GroundTruth> gts{Gt("a", BoxAt({0, 0, 10}))};
  const MetricReport r = Evaluate(gts, {});
  EXPECT_EQ(r.overall.ap_dist, 0.0);
  EXPECT_EQ(r.overall.mate, 1.0);
  EXPECT_EQ(r.overall.mase, 1.0);
  EXPECT_EQ(r.overall.maoe, 1.0);
  EXPECT_EQ(r.overall.ods, 0.0);
  EXPECT_EQ(r.false_negatives, 1);
}

TEST(EvaluateTest, EmptyGroundTruth) {
  try {
    Evaluate({}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyGroundTruth);
  }
}

bool SameClasses(const std::vector<ClassMetrics>& a,
                 const std::vector<ClassMetrics>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].label != b[i].label ||
        a[i].ap_iou_per_threshold != b[i].ap_iou_per_threshold ||
        a[i].ap_dist_per_threshold != b[i].ap_dist_per_threshold ||
        a[i].tp_error.ate != b[i].tp_error.ate ||
        a[i].tp_error.ase != b[i].tp_error.ase ||
        a[i].tp_error.aoe != b[i].tp_error.aoe ||
        a[i].true_positives != b[i].true_positives) {
      return false;
    }
  }
  return true;
}

Scene MixedScene() {
  SceneSpec spec;
  spec.n_frames = 25;
  spec.seed = 12;
  spec.classes = {{"car", Vec3(0.6, 1.5, 0.4), Vec3::Constant(0.2), 2.0},
                  {"sign", Vec3(-2.3, 0.0, 0.0), Vec3::Constant(0.1), 1.0},
                  {"person", Vec3(-0.7, -1.0, 0.5), Vec3::Constant(0.1), 1.0}};
  return Generate(spec);
}

TEST(EvaluateTest, ThreadAndOrderIndependent) {
  const Scene scene = MixedScene();
  auto gts = scene.AllGroundTruth();
  auto dets = Perturb(scene, {0.3, 0.1, 0.2, 0.1, 1.0, 4});
  const auto base = EvaluateClasses(gts, dets, {}, 1);
  EXPECT_TRUE(SameClasses(base, EvaluateClasses(gts, dets, {}, 8)));
  // Reorder whole frames; objects keep their order within a frame.
  std::mt19937_64 rng(3);
  std::map<std::string, std::uint64_t> key;
  for (const auto& g : gts) key.emplace(g.frame_id, rng());
  std::stable_sort(gts.begin(), gts.end(), [&](const auto& a, const auto& b) {
    return key[a.frame_id] < key[b.frame_id];
  });
  std::stable_sort(dets.begin(), dets.end(), [&](const auto& a, const auto& b) {
    return key[a.frame_id] < key[b.frame_id];
  });
  EXPECT_TRUE(SameClasses(base, EvaluateClasses(gts, dets, {}, 3)));
}

TEST(EvaluateTest, ScaleInvariance) {
  const Scene scene = MixedScene();
  auto gts = scene.AllGroundTruth();
  auto dets = Perturb(scene, {0.3, 0.1, 0.2, 0.0, 0.0, 4});
  const MetricReport before = Evaluate(gts, dets);
  const double k = 2.5;
  for (auto& g : gts) {
    g.box3d.center *= k;
    g.box3d.dims *= k;
  }
  for (auto& d : dets) {
    d.box3d.center *= k;
    d.box3d.dims *= k;
  }
  const MetricReport after = Evaluate(gts, dets);
  EXPECT_NEAR(after.overall.ap_iou, before.overall.ap_iou, 1e-9);
  EXPECT_NEAR(after.overall.ap_dist, before.overall.ap_dist, 1e-9);
  EXPECT_NEAR(after.overall.mate, before.overall.mate, 1e-9);
  EXPECT_NEAR(after.overall.mase, before.overall.mase, 1e-9);
  EXPECT_NEAR(after.overall.maoe, before.overall.maoe, 1e-9);
  EXPECT_NEAR(after.overall.ods, before.overall.ods, 1e-9);
}

TEST(EvaluateTest, MatchedTranslationErrorAtMostOne) {
  const Scene scene = MixedScene();
  const auto dets = Perturb(scene, {0.8, 0.2, 0.3, 0.0, 0.0, 2});
  for (const auto& c : EvaluateClasses(scene.AllGroundTruth(), dets, {})) {
    EXPECT_LE(c.tp_error.ate, 1.0);
    EXPECT_GE(c.tp_error.ate, 0.0);
    EXPECT_LE(c.tp_error.ase, 1.0);
    EXPECT_LE(c.tp_error.aoe, 1.0);
  }
}

TEST(CompareMatchingTest, ZeroNoiseHasNoGap) {
  const Scene scene = MixedScene();
  const MetricReport r =
      Evaluate(scene.AllGroundTruth(), Perturb(scene, {}));
  for (const auto& g : CompareMatching(r)) EXPECT_EQ(g.gap, 0.0);
}

TEST(CompareMatchingTest, ThinClassLeads) {
  const Scene scene = MixedScene();
  const MetricReport r =
      Evaluate(scene.AllGroundTruth(), Perturb(scene, {0.2, 0, 0, 0, 0, 8}));
  const auto gaps = CompareMatching(r);
  ASSERT_EQ(gaps.size(), 3u);
  EXPECT_EQ(gaps[0].label, "sign");
  for (size_t i = 1; i < gaps.size(); ++i) {
    EXPECT_GE(gaps[i - 1].gap, gaps[i].gap);
  }
}

}  // namespace
}  // namespace mood3d
