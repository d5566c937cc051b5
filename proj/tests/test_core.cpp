// Copyright 2026 The mtraj Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "mtraj/core.hpp"

#include <random>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace mtraj {
namespace {

using testing::traj;

std::vector<Point2> line(int n, Point2 start, Point2 step) {
  std::vector<Point2> pts;
  for (int i = 0; i < n; ++i) pts.push_back(start + static_cast<double>(i) * step);
  return pts;
}

TEST(TestCase, ShortTermCaseIsValid) {
  auto tc = make_test_case(Scene::uniform(100, 100, kPavement), Trajectory(line(8, {10, 10}, {1, 1})),
                           Trajectory(line(12, {18, 18}, {1, 1})), 12);
  EXPECT_EQ(tc.observed.size(), 8u);
  EXPECT_EQ(tc.horizon, 12);
  EXPECT_FALSE(tc.id.empty());
}

TEST(TestCase, PointOutsideSceneIsOutOfBounds) {
  EXPECT_MTRAJ_ERROR(make_test_case(Scene::uniform(100, 100, kPavement),
                                    traj({{-1, 5}, {1, 5}}), std::nullopt, 12),
                     ErrorCode::kOutOfBounds);
}

TEST(TestCase, UpperEdgeIsExclusive) {
  const auto scene = Scene::uniform(10, 10, kPavement);
  EXPECT_TRUE(scene.contains({9.999, 0}));
  EXPECT_FALSE(scene.contains({10, 0}));
  EXPECT_FALSE(scene.contains({0, 10}));
}

TEST(TestCase, GroundTruthLengthMustMatchHorizon) {
  EXPECT_MTRAJ_ERROR(make_test_case(Scene::uniform(100, 100, kPavement), Trajectory(line(8, {1, 1}, {1, 0})),
                                    Trajectory(line(11, {9, 1}, {1, 0})), 12),
                     ErrorCode::kLengthMismatch);
}

TEST(TestCase, HorizonMustBePositive) {
  EXPECT_MTRAJ_ERROR(make_test_case(Scene::uniform(10, 10, kPavement), traj({{1, 1}, {2, 2}}),
                                    std::nullopt, 0),
                     ErrorCode::kInvalidArgument);
}

TEST(TestCase, GeneratedIdDependsOnContentOnly) {
  auto a = make_test_case(Scene::uniform(10, 10, kPavement), traj({{1, 1}, {2, 2}}), std::nullopt, 3);
  auto b = make_test_case(Scene::uniform(10, 10, kPavement), traj({{1, 1}, {2, 2}}), std::nullopt, 3);
  auto c = make_test_case(Scene::uniform(10, 10, kPavement), traj({{1, 1}, {2, 3}}), std::nullopt, 3);
  EXPECT_EQ(a.id, b.id);
  EXPECT_NE(a.id, c.id);
}

TEST(TestCase, RandomConstructionAlwaysSatisfiesInvariants) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const auto tc = testing::random_case(rng);
    for (const auto& p : tc.observed.points()) EXPECT_TRUE(tc.scene.contains(p));
    ASSERT_TRUE(tc.ground_truth.has_value());
    EXPECT_EQ(tc.ground_truth->size(), static_cast<std::size_t>(tc.horizon));
    EXPECT_NO_THROW(validate(tc));
  }
}

TEST(Trajectory, RejectsEmptyAndNonFinite) {
  EXPECT_MTRAJ_ERROR(Trajectory(std::vector<Point2>{}), ErrorCode::kInvalidTrajectory);
  EXPECT_MTRAJ_ERROR(Trajectory({{0, std::nan("")}}), ErrorCode::kInvalidTrajectory);
  EXPECT_MTRAJ_ERROR(Trajectory({{0, 0}}, 0.0), ErrorCode::kInvalidTrajectory);
}

TEST(Scene, RejectsBadShapes) {
  EXPECT_MTRAJ_ERROR(Scene(0, 3, {}), ErrorCode::kInvalidScene);
  EXPECT_MTRAJ_ERROR(Scene(2, 2, {0, 0, 0}), ErrorCode::kInvalidScene);
  EXPECT_MTRAJ_ERROR(Scene(2, 1, {0, 6}), ErrorCode::kInvalidScene);
  EXPECT_MTRAJ_ERROR(Scene::uniform(2, 2, 0, 6, -1.0), ErrorCode::kInvalidScene);
}

TEST(Scene, RowMajorLayout) {
  const Scene s(3, 2, {0, 1, 2, 3, 4, 5});
  EXPECT_EQ(s.at(0, 2), 2);
  EXPECT_EQ(s.at(1, 0), 3);
}

TEST(PredictionSet, RejectsEmptyAndRagged) {
  EXPECT_MTRAJ_ERROR(PredictionSet(std::vector<Trajectory>{}), ErrorCode::kEmptySet);
  EXPECT_MTRAJ_ERROR(PredictionSet({traj({{0, 0}}), traj({{0, 0}, {1, 1}})}),
                     ErrorCode::kLengthMismatch);
}

TEST(Setting, Presets) {
  const auto s = make_run_config(Setting::kShort);
  EXPECT_EQ(s.observed_len, 8);
  EXPECT_EQ(s.horizon, 12);
  const auto l = make_run_config(Setting::kLong);
  EXPECT_EQ(l.observed_len, 5);
  EXPECT_EQ(l.horizon, 30);
  EXPECT_DOUBLE_EQ(preset(Setting::kLong).frame_interval, 1.0);
}

TEST(RunConfig, Validation) {
  RunConfig cfg;
  EXPECT_NO_THROW(validate(cfg));
  cfg.num_sources = 1;
  EXPECT_MTRAJ_ERROR(validate(cfg), ErrorCode::kTooFewSets);
  cfg = {};
  cfg.p_threshold = 1.0;
  EXPECT_MTRAJ_ERROR(validate(cfg), ErrorCode::kInvalidArgument);
  cfg = {};
  cfg.k = 0;
  EXPECT_MTRAJ_ERROR(validate(cfg), ErrorCode::kInvalidArgument);
}

TEST(Hashing, KnownValues) {
  // FNV-1a 64 of the empty string is the offset basis.
  EXPECT_EQ(detail::fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(detail::fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(detail::hex64(0xabcULL), "0000000000000abc");
}

}  // namespace
}  // namespace mtraj
