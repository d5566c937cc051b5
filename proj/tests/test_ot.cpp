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


#include "mtraj/ot.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace mtraj {
namespace {

using testing::pset;
using testing::traj;

// Oracle: minimum over all K! permutations.
double brute_force_min(const CostMatrix& c) {
  std::vector<std::size_t> perm(c.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) total += c(i, perm[i]);
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

CostMatrix random_matrix(std::mt19937_64& rng, std::size_t k) {
  std::uniform_real_distribution<double> u(0.0, 100.0);
  std::vector<double> e(k * k);
  for (auto& v : e) v = u(rng);
  return CostMatrix(k, std::move(e));
}

bool is_permutation(const std::vector<std::size_t>& perm) {
  std::vector<std::size_t> sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] != i) return false;
  }
  return true;
}

TEST(GroundDistance, Examples) {
  EXPECT_EQ(ground_distance(traj({{0, 0}, {1, 0}}), traj({{0, 1}, {1, 1}})), 1.0);
  EXPECT_EQ(ground_distance(traj({{0, 0}, {1, 0}}), traj({{0, 0}, {1, 0}})), 0.0);
  EXPECT_EQ(ground_distance(traj({{0, 0}}), traj({{3, 4}})), 5.0);
  EXPECT_MTRAJ_ERROR(ground_distance(traj({{0, 0}}), traj({{0, 0}, {1, 1}})), ErrorCode::kLengthMismatch);
}

TEST(SolveAssignment, CrossMatching) {
  const auto a = solve_assignment(CostMatrix::from_rows({{std::sqrt(5.0), 1}, {1, std::sqrt(5.0)}}));
  EXPECT_EQ(a.perm, (std::vector<std::size_t>{1, 0}));
  EXPECT_EQ(a.total_cost, 2.0);
}

TEST(SolveAssignment, IdentityMatching) {
  const auto a = solve_assignment(CostMatrix::from_rows({{0, 9}, {9, 0}}));
  EXPECT_EQ(a.perm, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(a.total_cost, 0.0);
}

TEST(SolveAssignment, SingleEntry) {
  const auto a = solve_assignment(CostMatrix::from_rows({{4.5}}));
  EXPECT_EQ(a.perm, (std::vector<std::size_t>{0}));
  EXPECT_EQ(a.total_cost, 4.5);
}

TEST(SolveAssignment, MatchesBruteForceOnRandomMatrices) {
  std::mt19937_64 rng(42);
  for (std::size_t k = 2; k <= 7; ++k) {
    for (int n = 0; n < 200; ++n) {
      const auto c = random_matrix(rng, k);
      const auto a = solve_assignment(c);
      ASSERT_TRUE(is_permutation(a.perm));
      ASSERT_NEAR(a.total_cost, brute_force_min(c), 1e-9) << "K=" << k;
    }
  }
}

TEST(SolveAssignment, TiesAndZeros) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> small(0, 2);
  for (int n = 0; n < 300; ++n) {
    const std::size_t k = 2 + static_cast<std::size_t>(n % 5);
    std::vector<double> e(k * k);
    for (auto& v : e) v = small(rng);
    const CostMatrix c(k, e);
    ASSERT_NEAR(solve_assignment(c).total_cost, brute_force_min(c), 1e-12);
  }
}

TEST(SolveAssignment, TotalIsExactlyInvariantUnderRowAndColumnPermutation) {
  std::mt19937_64 rng(4);
  for (int n = 0; n < 200; ++n) {
    const std::size_t k = 6;
    const auto c = random_matrix(rng, k);
    std::vector<std::size_t> rp(k), cp(k);
    std::iota(rp.begin(), rp.end(), 0);
    std::iota(cp.begin(), cp.end(), 0);
    std::shuffle(rp.begin(), rp.end(), rng);
    std::shuffle(cp.begin(), cp.end(), rng);
    std::vector<double> e(k * k);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) e[i * k + j] = c(rp[i], cp[j]);
    }
    ASSERT_EQ(solve_assignment(CostMatrix(k, e)).total_cost, solve_assignment(c).total_cost);
  }
}

TEST(CostMatrix, Validation) {
  EXPECT_MTRAJ_ERROR(CostMatrix(2, {1, 2, 3}), ErrorCode::kInvalidMatrix);
  EXPECT_MTRAJ_ERROR(CostMatrix(0, {}), ErrorCode::kInvalidMatrix);
  EXPECT_MTRAJ_ERROR(CostMatrix::from_rows({{1, 2}, {3}}), ErrorCode::kInvalidMatrix);
  EXPECT_MTRAJ_ERROR(CostMatrix::from_rows({{1, -1}, {3, 4}}), ErrorCode::kInvalidMatrix);
  EXPECT_MTRAJ_ERROR(CostMatrix::from_rows({{1, std::nan("")}, {3, 4}}), ErrorCode::kInvalidMatrix);
  EXPECT_MTRAJ_ERROR(CostMatrix::from_rows({{1, INFINITY}, {3, 4}}), ErrorCode::kInvalidMatrix);
}

TEST(Wasserstein, Examples) {
  const auto a = pset({{{0, 0}, {1, 0}}});
  EXPECT_EQ(wasserstein(a, a), 0.0);
  EXPECT_EQ(wasserstein(a, pset({{{0, 1}, {1, 1}}})), 1.0);
  // Cross matching (cost 1 + 1) beats the identity pairing (2 * sqrt 5).
  EXPECT_EQ(wasserstein(pset({{{0, 0}}, {{2, 0}}}), pset({{{2, 1}}, {{0, 1}}})), 1.0);
}

TEST(Wasserstein, SizeAndLengthMismatch) {
  EXPECT_MTRAJ_ERROR(wasserstein(pset({{{0, 0}}}), pset({{{0, 0}}, {{1, 1}}})), ErrorCode::kSizeMismatch);
  EXPECT_MTRAJ_ERROR(wasserstein(pset({{{0, 0}}}), pset({{{0, 0}, {1, 1}}})), ErrorCode::kLengthMismatch);
}

TEST(Wasserstein, MetricProperties) {
  std::mt19937_64 rng(99);
  for (int n = 0; n < 500; ++n) {
    const auto a = testing::random_set(rng, 5, 6);
    const auto b = testing::random_set(rng, 5, 6);
    const auto c = testing::random_set(rng, 5, 6);
    const double ab = wasserstein(a, b);
    EXPECT_EQ(wasserstein(a, a), 0.0);
    EXPECT_GE(ab, 0.0);
    EXPECT_NEAR(ab, wasserstein(b, a), 1e-9);
    EXPECT_LE(wasserstein(a, c), ab + wasserstein(b, c) + 1e-9);

    std::vector<Trajectory> shuffled(b.trajectories().begin(), b.trajectories().end());
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_EQ(wasserstein(a, PredictionSet(shuffled)), ab);
  }
}

TEST(Wasserstein, BoundedByAnyMatching) {
  std::mt19937_64 rng(5);
  for (int n = 0; n < 200; ++n) {
    const auto a = testing::random_set(rng, 6, 4);
    const auto b = testing::random_set(rng, 6, 4);
    double identity = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) identity += ground_distance(a[i], b[i]);
    EXPECT_LE(wasserstein(a, b), identity / 6.0 + 1e-12);
  }
}

}  // namespace
}  // namespace mtraj
