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


#include "mtraj/metrics.hpp"

#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace mtraj {
namespace {

using testing::pset;
using testing::traj;

TEST(Ade, Examples) {
  EXPECT_EQ(ade(traj({{0, 0}, {1, 0}}), traj({{0, 1}, {1, 1}})), 1.0);
  EXPECT_EQ(ade(traj({{0, 0}, {1, 0}}), traj({{0, 0}, {1, 0}})), 0.0);
  EXPECT_EQ(ade(traj({{0, 0}, {0, 0}}), traj({{3, 4}, {0, 0}})), 2.5);
  EXPECT_MTRAJ_ERROR(ade(traj({{0, 0}}), traj({{0, 0}, {1, 1}})), ErrorCode::kLengthMismatch);
}

TEST(Fde, Examples) {
  EXPECT_EQ(fde(traj({{0, 0}, {1, 0}}), traj({{0, 1}, {1, 1}})), 1.0);
  EXPECT_EQ(fde(traj({{0, 0}, {1, 0}}), traj({{0, 0}, {1, 0}})), 0.0);
  EXPECT_EQ(fde(traj({{9, 9}, {0, 0}}), traj({{0, 0}, {3, 4}})), 5.0);
  EXPECT_MTRAJ_ERROR(fde(traj({{0, 0}}), traj({{0, 0}, {1, 1}})), ErrorCode::kLengthMismatch);
}

TEST(DisplacementScores, BestOfAndMean) {
  // Per-trajectory ADEs 1 and 3.
  const auto gt = traj({{0, 0}, {0, 0}});
  const auto s = displacement_scores(pset({{{1, 0}, {1, 0}}, {{3, 0}, {3, 0}}}), gt);
  EXPECT_EQ(s.bon_ade, 1.0);
  EXPECT_EQ(s.mean_ade, 2.0);
  EXPECT_EQ(s.bon_fde, 1.0);
  EXPECT_EQ(s.mean_fde, 2.0);
}

TEST(DisplacementScores, SingleSampleBonEqualsMean) {
  const auto s = displacement_scores(pset({{{1, 2}, {3, 4}}}), traj({{0, 0}, {0, 0}}));
  EXPECT_EQ(s.bon_ade, s.mean_ade);
  EXPECT_EQ(s.bon_fde, s.mean_fde);
}

TEST(DisplacementScores, MatchesExhaustiveMinAndMean) {
  std::mt19937_64 rng(20);
  const auto preds = testing::random_set(rng, 20, 12);
  const auto gt = testing::random_traj(rng, 12);
  std::vector<double> a, f;
  for (const auto& p : preds.trajectories()) {
    a.push_back(ade(p, gt));
    f.push_back(fde(p, gt));
  }
  const auto s = displacement_scores(preds, gt);
  EXPECT_EQ(s.bon_ade, *std::min_element(a.begin(), a.end()));
  EXPECT_EQ(s.bon_fde, *std::min_element(f.begin(), f.end()));
  double ma = 0, mf = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mf += f[i];
  }
  EXPECT_NEAR(s.mean_ade, ma / 20, 1e-12);
  EXPECT_NEAR(s.mean_fde, mf / 20, 1e-12);
}

TEST(DisplacementScores, BestOfNeverExceedsMean) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> k(1, 20);
  for (int n = 0; n < 1000; ++n) {
    const auto preds = testing::random_set(rng, static_cast<std::size_t>(k(rng)), 6);
    const auto s = displacement_scores(preds, testing::random_traj(rng, 6));
    ASSERT_LE(s.bon_ade, s.mean_ade);
    ASSERT_LE(s.bon_fde, s.mean_fde);
    ASSERT_GE(s.bon_ade, 0.0);
  }
  // Identical samples: the mean must not round below the minimum.
  const auto t = traj({{0.1, 0.7}, {0.3, 0.9}});
  const PredictionSet same(std::vector<Trajectory>(7, t));
  const auto s = displacement_scores(same, traj({{0.2, 0.3}, {0.4, 0.1}}));
  EXPECT_LE(s.bon_ade, s.mean_ade);
}

TEST(Criterion, Spelling) {
  for (auto c : kAllCriteria) EXPECT_EQ(parse_criterion(to_string(c)), c);
  EXPECT_MTRAJ_ERROR(parse_criterion("ade"), ErrorCode::kBadFlag);
  const DisplacementScores s{1, 2, 3, 4};
  EXPECT_EQ(score_of(s, Criterion::kBonAde), 1);
  EXPECT_EQ(score_of(s, Criterion::kBonFde), 2);
  EXPECT_EQ(score_of(s, Criterion::kMeanAde), 3);
  EXPECT_EQ(score_of(s, Criterion::kMeanFde), 4);
}

TEST(BaselineCriterion, Examples) {
  const std::vector<double> ones(8, 1.0);
  EXPECT_EQ(baseline_criterion(ones, 1.0, 0.05), (CriterionDecision{1.0, false}));

  // Eight values with mean 1 and population standard deviation 0.5.
  const std::vector<double> spread{0.5, 1.5, 0.5, 1.5, 0.5, 1.5, 0.5, 1.5};
  const auto d = baseline_criterion(spread, 2.0, 0.05);
  EXPECT_NEAR(d.p_value, 0.02275, 1e-5);
  EXPECT_TRUE(d.violation);

  const auto below = baseline_criterion(spread, 0.8, 0.05);
  EXPECT_GT(below.p_value, 0.5);
  EXPECT_FALSE(below.violation);

  EXPECT_MTRAJ_ERROR(baseline_criterion(std::vector<double>{1.0}, 1.0, 0.05), ErrorCode::kTooFewSets);
}

}  // namespace
}  // namespace mtraj
