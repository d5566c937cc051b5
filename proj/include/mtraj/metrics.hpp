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

// Ground-truth displacement errors and the label-based baseline criteria.

#pragma once

#include <algorithm>
#include <array>
#include <limits>
#include <span>
#include <string>
#include <string_view>

#include "mtraj/core.hpp"
#include "mtraj/stats.hpp"

namespace mtraj {

inline double ade(const Trajectory& pred, const Trajectory& gt) {
  if (pred.size() != gt.size()) {
    throw Error(ErrorCode::kLengthMismatch, "ade: prediction has " + std::to_string(pred.size()) +
                                                " points, ground truth " +
                                                std::to_string(gt.size()));
  }
  double sum = 0.0;
  for (std::size_t t = 0; t < gt.size(); ++t) sum += distance(pred[t], gt[t]);
  return sum / static_cast<double>(gt.size());
}

inline double fde(const Trajectory& pred, const Trajectory& gt) {
  if (pred.size() != gt.size()) {
    throw Error(ErrorCode::kLengthMismatch, "fde: prediction has " + std::to_string(pred.size()) +
                                                " points, ground truth " +
                                                std::to_string(gt.size()));
  }
  return distance(pred.back(), gt.back());
}

struct DisplacementScores {
  double bon_ade = 0.0;
  double bon_fde = 0.0;
  double mean_ade = 0.0;
  double mean_fde = 0.0;

  friend bool operator==(const DisplacementScores&, const DisplacementScores&) = default;
};

inline DisplacementScores displacement_scores(const PredictionSet& preds, const Trajectory& gt) {
  if (preds.size() == 0) throw Error(ErrorCode::kEmptySet, "empty prediction set");
  DisplacementScores s;
  s.bon_ade = s.bon_fde = std::numeric_limits<double>::infinity();
  for (const auto& p : preds.trajectories()) {
    const double a = ade(p, gt);
    const double f = fde(p, gt);
    s.bon_ade = std::min(s.bon_ade, a);
    s.bon_fde = std::min(s.bon_fde, f);
    s.mean_ade += a;
    s.mean_fde += f;
  }
  s.mean_ade /= static_cast<double>(preds.size());
  s.mean_fde /= static_cast<double>(preds.size());
  // The mean of values that are all >= the minimum can round just below it.
  s.mean_ade = std::max(s.mean_ade, s.bon_ade);
  s.mean_fde = std::max(s.mean_fde, s.bon_fde);
  return s;
}

enum class Criterion { kBonAde, kBonFde, kMeanAde, kMeanFde };

inline constexpr std::array<Criterion, 4> kAllCriteria = {
    Criterion::kBonAde, Criterion::kBonFde, Criterion::kMeanAde, Criterion::kMeanFde};

inline std::string_view to_string(Criterion c) {
  switch (c) {
    case Criterion::kBonAde: return "bon-ade";
    case Criterion::kBonFde: return "bon-fde";
    case Criterion::kMeanAde: return "mean-ade";
    case Criterion::kMeanFde: return "mean-fde";
  }
  return "unknown";
}

inline Criterion parse_criterion(std::string_view s) {
  for (auto c : kAllCriteria) {
    if (to_string(c) == s) return c;
  }
  throw Error(ErrorCode::kBadFlag, "unknown criterion '" + std::string(s) +
                                       "' (expected mean-ade, mean-fde, bon-ade or bon-fde)");
}

inline double score_of(const DisplacementScores& s, Criterion c) {
  switch (c) {
    case Criterion::kBonAde: return s.bon_ade;
    case Criterion::kBonFde: return s.bon_fde;
    case Criterion::kMeanAde: return s.mean_ade;
    case Criterion::kMeanFde: return s.mean_fde;
  }
  return 0.0;
}

struct CriterionDecision {
  double p_value = 1.0;
  bool violation = false;

  friend bool operator==(const CriterionDecision&, const CriterionDecision&) = default;
};

/// z-test of one follow-up metric value against the N source values.
inline CriterionDecision baseline_criterion(std::span<const double> source_scores,
                                            double followup_score, double threshold,
                                            Sidedness side = Sidedness::kUpper) {
  if (source_scores.size() < 2) {
    throw Error(ErrorCode::kTooFewSets, "baseline criterion needs at least two source scores");
  }
  const auto vm = variation_measures(source_scores);
  const double p = z_test(followup_score, vm, side);
  return {p, is_violation(p, threshold)};
}

}  // namespace mtraj
