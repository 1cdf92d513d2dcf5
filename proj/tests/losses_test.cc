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

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "mood3d/error.h"

namespace mood3d {
namespace {

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::kInvalidArgument;
}

LiftParams Params(double base) {
  LiftParams p;
  p.u_off = base;
  p.v_off = base + 1;
  p.d_log = base - 2;
  p.dims_log = Vec3(base, -base, 0.5);
  p.rot6d = {Vec3(1, base, 0), Vec3(0, 1, base)};
  return p;
}

TEST(L13dTest, Examples) {
  const LiftParams a = Params(0.25);
  EXPECT_EQ(L13d(a, a), 0.0);
  LiftParams b = a;
  b.dims_log.y() += 0.5;
  EXPECT_DOUBLE_EQ(L13d(a, b), 0.5);
  const LiftParams c = Params(-1.5);
  EXPECT_EQ(L13d(a, c), L13d(c, a));
}

TEST(Giou2dTest, Examples) {
  const Box2D a{0, 0, 1, 1};
  EXPECT_EQ(Giou2d(a, a), 1.0);
  EXPECT_DOUBLE_EQ(Giou2d(a, {2, 0, 3, 1}), -1.0 / 3.0);
  EXPECT_DOUBLE_EQ(Giou2d(a, {0.5, 0, 1.5, 1}), 1.0 / 3.0);
}

TEST(Giou2dTest, BoundedByIou) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> pos(0.0, 10.0);
  std::uniform_real_distribution<double> len(0.1, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const double ax = pos(rng), ay = pos(rng), bx = pos(rng), by = pos(rng);
    const Box2D a{ax, ay, ax + len(rng), ay + len(rng)};
    const Box2D b{bx, by, bx + len(rng), by + len(rng)};
    const double iw = std::max(0.0, std::min(a.x2, b.x2) - std::max(a.x1, b.x1));
    const double ih = std::max(0.0, std::min(a.y2, b.y2) - std::max(a.y1, b.y1));
    const double inter = iw * ih;
    const double iou = inter / (a.Area() + b.Area() - inter);
    const double g = Giou2d(a, b);
    ASSERT_LE(g, iou + 1e-15);
    ASSERT_GT(g, -1.0);
    ASSERT_EQ(g, Giou2d(b, a));
  }
}

TEST(SilogTest, Examples) {
  const std::vector<double> gt{1.0, 2.0, 5.0};
  EXPECT_EQ(Silog(gt, gt, {}), 0.0);
  const std::vector<double> scaled{3.0, 6.0, 15.0};
  EXPECT_NEAR(Silog(scaled, gt, {}, 1.0), 0.0, 1e-15);
  const std::vector<double> pred{1.0, 4.0};
  const std::vector<double> ones{1.0, 1.0};
  const double l4 = std::log(4.0);
  EXPECT_NEAR(Silog(pred, ones, {}), l4 * l4 / 2 - 0.5 * (l4 / 2) * (l4 / 2),
              1e-15);
  EXPECT_NEAR(Silog(pred, ones, {}), 0.7207, 1e-4);
}

TEST(SilogTest, MaskSelectsPixels) {
  const std::vector<double> pred{1.0, 4.0, -3.0};
  const std::vector<double> gt{1.0, 1.0, 0.0};
  EXPECT_NEAR(Silog(pred, gt, {true, true, false}), 0.7207, 1e-4);
}

TEST(SilogTest, Errors) {
  const std::vector<double> one{1.0};
  const std::vector<double> two{1.0, 2.0};
  const std::vector<double> bad{1.0, 0.0};
  EXPECT_EQ(CodeOf([&] { Silog(two, two, {false, false}); }),
            ErrorCode::kEmptyMask);
  EXPECT_EQ(CodeOf([&] { Silog(bad, two, {}); }), ErrorCode::kNonPositiveDepth);
  EXPECT_EQ(CodeOf([&] { Silog(one, two, {}); }), ErrorCode::kLengthMismatch);
  EXPECT_EQ(CodeOf([&] { Silog(two, two, {true}); }),
            ErrorCode::kLengthMismatch);
}

TEST(FinalLossTest, Examples) {
  const std::vector<double> zeros{0.0, 0.0};
  EXPECT_EQ(FinalLoss(zeros, zeros, 0.0), 0.0);
  const std::vector<double> l2d{1.0};
  const std::vector<double> l3d{2.0};
  EXPECT_EQ(FinalLoss(l2d, l3d, 0.1), 4.0);
}

TEST(FinalLossTest, LinearInDepth) {
  const std::vector<double> l2d{0.3, 0.2};
  const std::vector<double> l3d{0.7, 0.1};
  LossWeights w;
  w.lambda_depth = 2.5;
  const double base = FinalLoss(l2d, l3d, 0.0, w);
  for (double d : {0.5, 1.0, 3.0}) {
    EXPECT_NEAR(FinalLoss(l2d, l3d, d, w) - base, 2.5 * d, 1e-12);
  }
}

TEST(FinalLossTest, LayerCountChecked) {
  const std::vector<double> one{1.0};
  const std::vector<double> two{1.0, 1.0};
  EXPECT_EQ(CodeOf([&] { FinalLoss(one, two, 0.0); }),
            ErrorCode::kLengthMismatch);
  LossWeights w;
  w.num_decoder_layers = 6;
  EXPECT_EQ(CodeOf([&] { FinalLoss(two, two, 0.0, w); }),
            ErrorCode::kLengthMismatch);
}

}  // namespace
}  // namespace mood3d
