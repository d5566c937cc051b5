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

// Suite aggregation tables and the agreement analysis between the
// label-free Wasserstein criterion and the ground-truth criteria: the
// label decisions are treated as classes, the Wasserstein decisions as
// predictions.

#pragma once

#include <cstdio>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "mtraj/harness.hpp"
#include "mtraj/metrics.hpp"

namespace mtraj {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
};

struct ClassificationScores {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

// Empty denominators score 1.0 so an all-healthy run does not produce NaN.
inline ClassificationScores classification_scores(const ConfusionCounts& c) {
  if (c.total() == 0) throw Error(ErrorCode::kEmptyInput, "no decisions to score");
  ClassificationScores s;
  s.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  s.precision = c.tp + c.fp == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  s.recall = c.tp + c.fn == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  return s;
}

inline ConfusionCounts confusion(const std::vector<bool>& labels,
                                 const std::vector<bool>& predictions) {
  if (labels.size() != predictions.size()) {
    throw Error(ErrorCode::kLengthMismatch, "labels and predictions differ in length");
  }
  if (labels.empty()) throw Error(ErrorCode::kEmptyInput, "no decisions to score");
  ConfusionCounts c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i]) {
      (predictions[i] ? c.tp : c.fn)++;
    } else {
      (predictions[i] ? c.fp : c.tn)++;
    }
  }
  return c;
}

inline ClassificationScores classification_scores(const std::vector<bool>& labels,
                                                  const std::vector<bool>& predictions) {
  return classification_scores(confusion(labels, predictions));
}

/// Label decisions use this fixed threshold while the Wasserstein threshold is swept.
inline constexpr double kLabelThreshold = 0.05;

inline const std::vector<double>& default_sweep_thresholds() {
  static const std::vector<double> kThresholds{0.01, 0.025, 0.05, 0.10, 0.15, 0.20};
  return kThresholds;
}

struct SweepRow {
  double threshold = 0.0;
  ClassificationScores scores;
  ConfusionCounts counts;
};

/// Every (case, source sample) comparison is one decision. Its label is the
/// case's ground-truth criterion decision at kLabelThreshold; its prediction
/// is `p <= threshold` on the stored Wasserstein p-value.
inline std::vector<SweepRow> threshold_sweep(const SuiteReport& suite, Criterion label,
                                             std::span<const double> thresholds) {
  std::vector<bool> labels;
  std::vector<double> p_values;
  for (const auto& per_mr : suite.reports) {
    for (const auto& r : per_mr) {
      if (!r.baselines) {
        throw Error(ErrorCode::kMissingBaselines,
                    "test case '" + r.test_case_id + "' has no ground-truth criteria");
      }
      const bool lab = is_violation((*r.baselines)[label].p_value, kLabelThreshold);
      for (const auto& c : r.comparisons) {
        labels.push_back(lab);
        p_values.push_back(c.p_value);
      }
    }
  }
  if (labels.empty()) throw Error(ErrorCode::kMissingBaselines, "report has no comparisons");

  std::vector<SweepRow> rows;
  std::vector<bool> predictions(p_values.size());
  for (double t : thresholds) {
    for (std::size_t i = 0; i < p_values.size(); ++i) predictions[i] = is_violation(p_values[i], t);
    const auto counts = confusion(labels, predictions);
    rows.push_back({t, classification_scores(counts), counts});
  }
  return rows;
}

namespace detail {

inline std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

inline std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace detail

inline std::string sweep_to_csv(std::span<const SweepRow> rows) {
  std::ostringstream out;
  out << "threshold,accuracy,precision,recall\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%g,%.6f,%.6f,%.6f\n", r.threshold, r.scores.accuracy,
                  r.scores.precision, r.scores.recall);
    out << buf;
  }
  return out.str();
}

/// Violation rates in percent: one row per relation, columns WVC, BoN-ADE,
/// BoN-FDE, Mean-ADE, Mean-FDE. Criteria without ground truth print "-".
inline std::string format_rate_table(std::span<const RelationSummary> rows) {
  std::ostringstream out;
  out << detail::pad("MR", 16) << detail::pad("WVC", 9) << detail::pad("BoN-ADE", 9)
      << detail::pad("BoN-FDE", 9) << detail::pad("Mean-ADE", 9) << "Mean-FDE\n";
  for (const auto& r : rows) {
    out << detail::pad(to_string(r.mr), 16) << detail::pad(detail::fixed(r.wvc.rate_percent(), 1), 9);
    for (std::size_t c = 0; c < kAllCriteria.size(); ++c) {
      std::string cell = r.has_baselines ? detail::fixed(r.baselines[c].rate_percent(), 1) : "-";
      out << (c + 1 < kAllCriteria.size() ? detail::pad(cell, 9) : cell);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace mtraj
