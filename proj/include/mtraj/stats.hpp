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

// Null distribution of the Wasserstein violation criterion and its z-test.

#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "mtraj/core.hpp"
#include "mtraj/ot.hpp"

namespace mtraj {

struct VariationMeasures {
  double mu = 0.0;
  double sigma = 0.0;  // population standard deviation
  std::size_t count = 0;

  friend bool operator==(const VariationMeasures&, const VariationMeasures&) = default;
};

/// Below this the null distribution is treated as a point mass.
inline constexpr double kDegenerateSigma = 1e-12;
/// With a point-mass null, distances within this margin of mu are not violations.
inline constexpr double kDegenerateMargin = 1e-9;

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// All N(N-1)/2 unordered-pair distances, ordered (0,1), (0,2), ..., (N-2,N-1).
inline std::vector<double> pairwise_distances(std::span<const PredictionSet> sets) {
  if (sets.size() < 2) {
    throw Error(ErrorCode::kTooFewSets, "need at least two prediction sets, got " +
                                            std::to_string(sets.size()));
  }
  std::vector<double> out;
  out.reserve(sets.size() * (sets.size() - 1) / 2);
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = i + 1; j < sets.size(); ++j) out.push_back(wasserstein(sets[i], sets[j]));
  }
  return out;
}

inline VariationMeasures variation_measures(std::span<const double> d) {
  if (d.empty()) throw Error(ErrorCode::kEmptyInput, "variation_measures of an empty sequence");
  const double n = static_cast<double>(d.size());
  // Shifted by the first value: a constant sequence yields exactly mu = v, sigma = 0.
  const double shift = d.front();
  double acc = 0.0;
  for (double x : d) acc += x - shift;
  const double mu = shift + acc / n;
  double sq = 0.0;
  for (double x : d) sq += (x - mu) * (x - mu);
  return {mu, std::sqrt(sq / n), d.size()};
}

/// p-value of distance `d` against the null (mu, sigma).
inline double z_test(double d, const VariationMeasures& vm, Sidedness side = Sidedness::kUpper) {
  if (vm.sigma < kDegenerateSigma) {
    const bool outside = side == Sidedness::kUpper ? d > vm.mu + kDegenerateMargin
                                                   : std::abs(d - vm.mu) > kDegenerateMargin;
    return outside ? 0.0 : 1.0;
  }
  const double z = (d - vm.mu) / vm.sigma;
  if (side == Sidedness::kUpper) return 0.5 * std::erfc(z / std::numbers::sqrt2);
  return std::erfc(std::abs(z) / std::numbers::sqrt2);
}

inline bool is_violation(double p, double threshold) { return p <= threshold; }

}  // namespace mtraj
