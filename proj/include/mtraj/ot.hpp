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

// Exact optimal transport between two equal-size sets of sampled
// trajectories. With uniform weights 1/K on both sides the transport plan is
// a permutation, so the 1-Wasserstein distance reduces to a minimum-cost
// perfect matching, solved here with a shortest-augmenting-path Hungarian
// method in O(K^3).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "mtraj/core.hpp"

namespace mtraj {

/// Mean per-timestep Euclidean distance between two equal-length trajectories.
inline double ground_distance(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kLengthMismatch, "ground_distance: lengths " +
                                                std::to_string(a.size()) + " and " +
                                                std::to_string(b.size()));
  }
  double sum = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) sum += distance(a[t], b[t]);
  return sum / static_cast<double>(a.size());
}

class CostMatrix {
 public:
  CostMatrix(std::size_t k, std::vector<double> entries) : k_(k), entries_(std::move(entries)) {
    if (k_ == 0) throw Error(ErrorCode::kInvalidMatrix, "cost matrix must be non-empty");
    if (entries_.size() != k_ * k_) {
      throw Error(ErrorCode::kInvalidMatrix, "cost matrix is not square");
    }
    for (double v : entries_) {
      if (!std::isfinite(v) || v < 0.0) {
        throw Error(ErrorCode::kInvalidMatrix, "cost entries must be finite and >= 0");
      }
    }
  }

  static CostMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    std::vector<double> flat;
    for (const auto& r : rows) {
      if (r.size() != rows.size()) {
        throw Error(ErrorCode::kInvalidMatrix, "cost matrix is not square");
      }
      flat.insert(flat.end(), r.begin(), r.end());
    }
    return CostMatrix(rows.size(), std::move(flat));
  }

  std::size_t size() const { return k_; }
  double operator()(std::size_t row, std::size_t col) const { return entries_[row * k_ + col]; }

 private:
  std::size_t k_;
  std::vector<double> entries_;
};

struct Assignment {
  std::vector<std::size_t> perm;  // row i is matched to column perm[i]
  double total_cost = 0.0;
};

namespace detail {

// Sum of the matched costs in ascending order, so the total does not depend
// on the order in which rows or columns were presented.
inline double matched_total(const CostMatrix& c, const std::vector<std::size_t>& perm) {
  std::vector<double> matched(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) matched[i] = c(i, perm[i]);
  std::sort(matched.begin(), matched.end());
  double total = 0.0;
  for (double v : matched) total += v;
  return total;
}

}  // namespace detail

/// Minimum-cost perfect matching on a square cost matrix.
inline Assignment solve_assignment(const CostMatrix& c) {
  const std::size_t n = c.size();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based potentials with a virtual column 0, as in the classic
  // shortest-augmenting-path formulation.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match_col(n + 1, 0), way(n + 1, 0);
  for (std::size_t row = 1; row <= n; ++row) {
    match_col[0] = row;
    std::size_t col0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[col0] = 1;
      const std::size_t row0 = match_col[col0];
      double delta = kInf;
      std::size_t col1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = c(row0 - 1, j - 1) - u[row0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = col0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          col1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match_col[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      col0 = col1;
    } while (match_col[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      match_col[col0] = match_col[col1];
      col0 = col1;
    } while (col0 != 0);
  }

  Assignment out;
  out.perm.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) out.perm[match_col[j] - 1] = j - 1;
  out.total_cost = detail::matched_total(c, out.perm);
  return out;
}

/// C[i][j] = ground_distance(a[i], b[j]).
inline CostMatrix trajectory_cost_matrix(const PredictionSet& a, const PredictionSet& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kSizeMismatch, "prediction sets have " + std::to_string(a.size()) +
                                              " and " + std::to_string(b.size()) +
                                              " trajectories");
  }
  if (a.horizon() != b.horizon()) {
    throw Error(ErrorCode::kLengthMismatch, "prediction sets have different horizons");
  }
  const std::size_t k = a.size();
  std::vector<double> entries(k * k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) entries[i * k + j] = ground_distance(a[i], b[j]);
  }
  return CostMatrix(k, std::move(entries));
}

/// Uniform-weight 1-Wasserstein distance between the empirical distributions
/// of two equal-size trajectory sets.
inline double wasserstein(const PredictionSet& a, const PredictionSet& b) {
  const auto cost = trajectory_cost_matrix(a, b);
  return solve_assignment(cost).total_cost / static_cast<double>(cost.size());
}

}  // namespace mtraj
