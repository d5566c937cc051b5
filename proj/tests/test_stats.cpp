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


#include "mtraj/stats.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace mtraj {
namespace {

using testing::pset;

// Oracle: 0.5 + composite Simpson integral of the standard normal density over [0, z].
double phi_by_quadrature(double z) {
  const int n = 20000;
  const double h = z / n;
  const auto pdf = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2 * std::numbers::pi); };
  double s = pdf(0.0) + pdf(z);
  for (int i = 1; i < n; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * pdf(i * h);
  return 0.5 + s * h / 3.0;
}

TEST(NormalCdf, ReferenceValues) {
  // High-precision reference values.
  EXPECT_NEAR(normal_cdf(-3.0), 0.0013498980316300945, 1e-15);
  EXPECT_NEAR(normal_cdf(-2.0), 0.022750131948179207, 1e-15);
  EXPECT_NEAR(normal_cdf(-1.0), 0.15865525393145705, 1e-15);
  EXPECT_EQ(normal_cdf(0.0), 0.5);
  EXPECT_NEAR(normal_cdf(1.0), 0.8413447460685429, 1e-15);
  EXPECT_NEAR(normal_cdf(2.0), 0.9772498680518208, 1e-15);
  EXPECT_NEAR(normal_cdf(3.0), 0.9986501019683699, 1e-15);
  EXPECT_NEAR(normal_cdf(1.6449), 0.9500047825316537, 1e-15);
  EXPECT_NEAR(normal_cdf(1.6448536269514722), 0.95, 1e-15);
  EXPECT_NEAR(normal_cdf(2.0), 0.97725, 1e-6);
}

TEST(NormalCdf, AgreesWithQuadrature) {
  for (double z = -6.0; z <= 6.0; z += 0.37) {
    EXPECT_NEAR(normal_cdf(z), phi_by_quadrature(z), 1e-10) << "z=" << z;
  }
}

TEST(NormalCdf, SymmetryAndMonotonicity) {
  double prev = 0.0;
  for (double z = -8.0; z <= 8.0; z += 0.01) {
    EXPECT_NEAR(normal_cdf(z) + normal_cdf(-z), 1.0, 1e-15);
    EXPECT_GE(normal_cdf(z), prev);
    prev = normal_cdf(z);
  }
  EXPECT_GT(normal_cdf(-30.0), 0.0);  // the upper tail does not cancel to zero
}

TEST(PairwiseDistances, Counts) {
  std::mt19937_64 rng(1);
  std::vector<PredictionSet> sets;
  for (int i = 0; i < 8; ++i) sets.push_back(testing::random_set(rng, 3, 4));
  EXPECT_EQ(pairwise_distances(sets).size(), 28u);
}

TEST(PairwiseDistances, IdenticalPair) {
  const auto a = pset({{{1, 1}, {2, 2}}});
  const std::vector<PredictionSet> sets{a, a};
  EXPECT_EQ(pairwise_distances(sets), std::vector<double>{0.0});
}

TEST(PairwiseDistances, KnownValuesInPairOrder) {
  // Points at 0, -1 and 2 on a line: (0,1) = 1, (0,2) = 2, (1,2) = 3.
  const std::vector<PredictionSet> sets{pset({{{0, 0}}}), pset({{{-1, 0}}}), pset({{{2, 0}}})};
  EXPECT_EQ(pairwise_distances(sets), (std::vector<double>{1, 2, 3}));
}

TEST(PairwiseDistances, TooFewSets) {
  const std::vector<PredictionSet> one{pset({{{0, 0}}})};
  EXPECT_MTRAJ_ERROR(pairwise_distances(one), ErrorCode::kTooFewSets);
}

TEST(VariationMeasures, Examples) {
  const std::vector<double> d{1, 2, 3};
  const auto vm = variation_measures(d);
  EXPECT_EQ(vm.mu, 2.0);
  EXPECT_NEAR(vm.sigma, std::sqrt(2.0 / 3.0), 1e-15);
  EXPECT_EQ(vm.count, 3u);
  const std::vector<double> one{5};
  EXPECT_EQ(variation_measures(one), (VariationMeasures{5.0, 0.0, 1}));
  EXPECT_MTRAJ_ERROR(variation_measures(std::vector<double>{}), ErrorCode::kEmptyInput);
}

TEST(VariationMeasures, EqualValuesAreExactlyDegenerate) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  for (int n = 0; n < 1000; ++n) {
    const double v = u(rng);
    const std::vector<double> d(28, v);
    const auto vm = variation_measures(d);
    ASSERT_EQ(vm.mu, v);
    ASSERT_EQ(vm.sigma, 0.0);
  }
}

TEST(ZTest, WorkedExample) {
  const VariationMeasures vm{1.0, 0.5, 28};
  EXPECT_NEAR(z_test(2.0, vm), 0.022750131948179207, 1e-12);
  EXPECT_NEAR(z_test(2.0, vm), 0.02275, 1e-5);
  EXPECT_EQ(z_test(1.0, vm), 0.5);
  EXPECT_GT(z_test(0.5, vm), 0.5);
  EXPECT_NEAR(z_test(2.0, vm, Sidedness::kTwoSided), 2 * 0.022750131948179207, 1e-12);
  EXPECT_NEAR(z_test(0.0, vm, Sidedness::kTwoSided), 2 * 0.022750131948179207, 1e-12);
}

TEST(ZTest, DegenerateSigmaRules) {
  const VariationMeasures vm{3.0, 0.0, 28};
  EXPECT_EQ(z_test(3.0, vm), 1.0);
  EXPECT_EQ(z_test(3.0 + 1e-10, vm), 1.0);
  EXPECT_EQ(z_test(3.0 + 1e-6, vm), 0.0);
  EXPECT_EQ(z_test(2.0, vm), 1.0);
  EXPECT_EQ(z_test(2.0, vm, Sidedness::kTwoSided), 0.0);
  EXPECT_EQ(z_test(3.0, VariationMeasures{3.0, 1e-13, 28}), 1.0);
}

TEST(ZTest, UpperTailIsMonotoneInDistance) {
  const VariationMeasures vm{2.0, 0.7, 28};
  double prev = 1.0;
  for (double d = 0.0; d < 10.0; d += 0.05) {
    const double p = z_test(d, vm);
    EXPECT_LE(p, prev);
    EXPECT_GE(p, 0.0);
    prev = p;
  }
}

TEST(IsViolation, InclusiveBoundary) {
  EXPECT_TRUE(is_violation(0.02275, 0.05));
  EXPECT_FALSE(is_violation(0.5, 0.05));
  EXPECT_TRUE(is_violation(0.05, 0.05));
}

}  // namespace
}  // namespace mtraj
