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

// The metamorphic test process for stochastic trajectory predictors.
//
// For one source test case the predictor is sampled N times; the pairwise
// Wasserstein distances between those N prediction sets form the null
// distribution. The follow-up test case (the source under a metamorphic
// relation) is predicted once, compared against each source prediction set,
// and every comparison whose distance is a significant upper outlier of the
// null distribution counts as a violation.
//
// The module also ships seeded synthetic predictors used for calibration
// and fault injection.

#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "mtraj/core.hpp"
#include "mtraj/metrics.hpp"
#include "mtraj/ot.hpp"
#include "mtraj/stats.hpp"
#include "mtraj/transforms.hpp"

namespace mtraj {

using PredictFn = std::function<PredictionSet(const TestCase&, int k, std::uint64_t seed)>;

struct SutHandle {
  std::string name;
  bool deterministic_given_seed = true;
  // When false the harness serialises all calls through one gate.
  bool concurrent_safe = true;
  PredictFn invoke;
};

// ---------------------------------------------------------------------------
// Synthetic predictors
// ---------------------------------------------------------------------------

struct SyntheticParams {
  double noise_scale = 1.0;  // pixels per step, at the default rescale factor
  bool scale_noise_with_frame = true;
  Point2 drift{2.0, 2.0};  // per-step, world frame; only used by the biased predictor
  std::vector<std::uint8_t> walkable_classes{kRoad, kPavement, kTerrain};
  double goal_radius = 20.0;  // pixels, at the default rescale factor
};

namespace detail {

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(splitmix64(seed)); }

/// Scale of the scene's frame relative to the default rescale factor.
inline double frame_ratio(const Scene& scene) {
  return scene.rescale_factor() / kDefaultRescaleFactor;
}

inline void require_history(const TestCase& tc) {
  if (tc.observed.size() < 2) {
    throw Error(ErrorCode::kTooShortHistory, "predictor needs at least two observed points");
  }
}

inline void require_k(int k) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "K must be >= 1");
}

}  // namespace detail

/// Noise-free constant-velocity continuation of the last two observed points.
inline Trajectory constant_velocity(const Trajectory& observed, int horizon) {
  if (observed.size() < 2) {
    throw Error(ErrorCode::kTooShortHistory, "constant velocity needs two observed points");
  }
  const Point2 last = observed.back();
  const Point2 vel = last - observed[observed.size() - 2];
  std::vector<Point2> pts;
  pts.reserve(static_cast<std::size_t>(horizon));
  for (int t = 1; t <= horizon; ++t) pts.push_back(last + static_cast<double>(t) * vel);
  return Trajectory(std::move(pts), observed.frame_interval());
}

/// K identical constant-velocity continuations; ignores the seed.
inline PredictionSet echo_predict(const TestCase& tc, int k) {
  detail::require_history(tc);
  detail::require_k(k);
  return PredictionSet(std::vector<Trajectory>(static_cast<std::size_t>(k),
                                               constant_velocity(tc.observed, tc.horizon)));
}

/// Constant velocity plus independent isotropic Gaussian noise at every step.
inline PredictionSet cvg_predict(const TestCase& tc, int k, std::uint64_t seed,
                                 double noise_scale, bool scale_noise_with_frame = true) {
  detail::require_history(tc);
  detail::require_k(k);
  const auto mean = constant_velocity(tc.observed, tc.horizon);
  const double sd = scale_noise_with_frame ? noise_scale * detail::frame_ratio(tc.scene)
                                           : noise_scale;
  auto rng = detail::make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Trajectory> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int s = 0; s < k; ++s) {
    std::vector<Point2> pts;
    pts.reserve(mean.size());
    for (const auto& p : mean.points()) {
      const double nx = normal(rng);
      const double ny = normal(rng);
      pts.push_back({p.x + sd * nx, p.y + sd * ny});
    }
    out.emplace_back(std::move(pts), mean.frame_interval());
  }
  return PredictionSet(std::move(out));
}

/// cvg_predict plus a cumulative drift in a fixed world direction. The drift
/// ignores any mirroring of the frame, so the predictor is not equivariant.
inline PredictionSet biased_predict(const TestCase& tc, int k, std::uint64_t seed, Point2 drift,
                                    double noise_scale, bool scale_noise_with_frame = true) {
  const auto base = cvg_predict(tc, k, seed, noise_scale, scale_noise_with_frame);
  std::vector<Trajectory> out;
  out.reserve(base.size());
  for (const auto& t : base.trajectories()) {
    std::vector<Point2> pts(t.points().begin(), t.points().end());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      pts[i] = pts[i] + static_cast<double>(i + 1) * drift;
    }
    out.emplace_back(std::move(pts), t.frame_interval());
  }
  return PredictionSet(std::move(out));
}

/// Map-aware predictor: each sample walks in a straight line to a goal drawn
/// uniformly from the walkable cells near the last observed point. A cell's
/// goal point is its integer anchor (column, row), which the mirror maps send
/// onto the anchor of the mirrored cell.
inline PredictionSet goal_predict(const TestCase& tc, int k, std::uint64_t seed,
                                  std::span<const std::uint8_t> walkable_classes,
                                  double noise_scale, double goal_radius = 20.0) {
  detail::require_history(tc);
  detail::require_k(k);
  const Scene& scene = tc.scene;
  std::array<bool, 256> walkable{};
  for (auto c : walkable_classes) walkable[c] = true;

  const double ratio = detail::frame_ratio(scene);
  const double radius = goal_radius * ratio;
  const Point2 last = tc.observed.back();

  std::vector<Point2> near, all;
  for (int i = 0; i < scene.height(); ++i) {
    for (int j = 0; j < scene.width(); ++j) {
      if (!walkable[scene.at(i, j)]) continue;
      const Point2 anchor{static_cast<double>(j), static_cast<double>(i)};
      all.push_back(anchor);
      if (distance(anchor, last) <= radius) near.push_back(anchor);
    }
  }
  if (all.empty()) throw Error(ErrorCode::kNoWalkableCells, "scene has no walkable cells");
  const auto& candidates = near.empty() ? all : near;

  auto rng = detail::make_rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sd = noise_scale * ratio;
  std::vector<Trajectory> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int s = 0; s < k; ++s) {
    const Point2 goal = candidates[pick(rng)];
    std::vector<Point2> pts;
    pts.reserve(static_cast<std::size_t>(tc.horizon));
    for (int t = 1; t <= tc.horizon; ++t) {
      const double frac = static_cast<double>(t) / tc.horizon;
      const Point2 p = last + frac * (goal - last);
      const double nx = normal(rng);
      const double ny = normal(rng);
      // The last step lands on the goal exactly when there is no noise.
      pts.push_back(sd > 0.0 ? Point2{p.x + sd * nx, p.y + sd * ny}
                             : (t == tc.horizon ? goal : p));
    }
    out.emplace_back(std::move(pts), tc.observed.frame_interval());
  }
  return PredictionSet(std::move(out));
}

/// Resolves `builtin:cvg`, `builtin:biased`, `builtin:goal` and `builtin:echo`.
inline SutHandle make_builtin_sut(std::string_view spec, const SyntheticParams& params = {}) {
  constexpr std::string_view kPrefix = "builtin:";
  const auto name = spec.starts_with(kPrefix) ? spec.substr(kPrefix.size()) : spec;
  SutHandle h;
  h.name = "builtin:" + std::string(name);
  if (name == "cvg") {
    h.invoke = [params](const TestCase& tc, int k, std::uint64_t seed) {
      return cvg_predict(tc, k, seed, params.noise_scale, params.scale_noise_with_frame);
    };
  } else if (name == "biased") {
    h.invoke = [params](const TestCase& tc, int k, std::uint64_t seed) {
      return biased_predict(tc, k, seed, params.drift, params.noise_scale,
                            params.scale_noise_with_frame);
    };
  } else if (name == "goal") {
    h.invoke = [params](const TestCase& tc, int k, std::uint64_t seed) {
      return goal_predict(tc, k, seed, params.walkable_classes, params.noise_scale,
                          params.goal_radius);
    };
  } else if (name == "echo") {
    h.invoke = [](const TestCase& tc, int k, std::uint64_t) { return echo_predict(tc, k); };
  } else {
    throw Error(ErrorCode::kUnknownSut, "unknown built-in predictor '" + std::string(spec) +
                                            "' (expected cvg, biased, goal or echo)");
  }
  return h;
}

// ---------------------------------------------------------------------------
// Test process
// ---------------------------------------------------------------------------

struct Comparison {
  double distance = 0.0;
  double p_value = 1.0;
  bool violation = false;

  friend bool operator==(const Comparison&, const Comparison&) = default;
};

struct BaselineReport {
  std::vector<DisplacementScores> source_scores;  // one per source prediction set
  DisplacementScores followup_scores;             // in source-frame units
  std::array<CriterionDecision, 4> decisions{};   // indexed by Criterion

  const CriterionDecision& operator[](Criterion c) const {
    return decisions[static_cast<std::size_t>(c)];
  }

  friend bool operator==(const BaselineReport&, const BaselineReport&) = default;
};

struct TestCaseReport {
  std::string test_case_id;
  MetamorphicRelation mr;
  std::vector<double> pairwise;  // null distances between source sets
  double mu_src = 0.0;
  double sigma_src = 0.0;
  std::vector<Comparison> comparisons;  // one per source set
  int violation_counter = 0;
  std::optional<BaselineReport> baselines;

  friend bool operator==(const TestCaseReport&, const TestCaseReport&) = default;
};

/// Source-side predictions and their null distribution. They depend only on
/// the source test case, so one SourceRun serves every relation.
struct SourceRun {
  std::vector<PredictionSet> sets;
  std::vector<double> pairwise;
  VariationMeasures null;
};

namespace detail {

inline PredictionSet call_sut(const SutHandle& sut, const TestCase& tc, int k,
                              std::uint64_t seed) {
  std::optional<PredictionSet> preds;
  try {
    preds.emplace(sut.invoke(tc, k, seed));
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kSutFailure, sut.name + ": " + e.what());
  }
  if (preds->size() != static_cast<std::size_t>(k) ||
      preds->horizon() != static_cast<std::size_t>(tc.horizon)) {
    throw Error(ErrorCode::kSutFailure,
                sut.name + " returned " + std::to_string(preds->size()) + "x" +
                    std::to_string(preds->horizon()) + " trajectories, expected " +
                    std::to_string(k) + "x" + std::to_string(tc.horizon));
  }
  return std::move(*preds);
}

inline DisplacementScores divide(DisplacementScores s, double by) {
  return {s.bon_ade / by, s.bon_fde / by, s.mean_ade / by, s.mean_fde / by};
}

}  // namespace detail

/// Preparation phase: N source predictions with seeds seed+1 .. seed+N.
inline SourceRun prepare_sources(const SutHandle& sut, const TestCase& tc,
                                 const RunConfig& cfg) {
  validate(cfg);
  validate(tc);
  SourceRun run;
  run.sets.reserve(static_cast<std::size_t>(cfg.num_sources));
  for (int i = 1; i <= cfg.num_sources; ++i) {
    run.sets.push_back(detail::call_sut(sut, tc, cfg.k, cfg.seed + static_cast<std::uint64_t>(i)));
  }
  run.pairwise = pairwise_distances(run.sets);
  run.null = variation_measures(run.pairwise);
  return run;
}

/// Metamorphic and evaluation phases for one relation. The follow-up is
/// predicted once with seed+N+1 and, unless cfg.forward_frame is set, mapped
/// back to the source frame so distances share units with the null.
inline TestCaseReport evaluate_relation(const SutHandle& sut, const TestCase& tc,
                                        const MetamorphicRelation& mr, const RunConfig& cfg,
                                        const SourceRun& src) {
  const TestCase followup = transform_input(mr, tc);
  const auto fu_pred = detail::call_sut(
      sut, followup, cfg.k, cfg.seed + static_cast<std::uint64_t>(cfg.num_sources) + 1);

  TestCaseReport rep;
  rep.test_case_id = tc.id;
  rep.mr = mr;
  rep.pairwise = src.pairwise;
  rep.mu_src = src.null.mu;
  rep.sigma_src = src.null.sigma;

  const auto fu_in_source = inverse_transform_output(mr, fu_pred, tc.scene);
  for (const auto& source_set : src.sets) {
    Comparison c;
    c.distance = cfg.forward_frame
                     ? wasserstein(fu_pred, transform_output(mr, source_set, tc.scene))
                     : wasserstein(fu_in_source, source_set);
    c.p_value = z_test(c.distance, src.null, cfg.sidedness);
    c.violation = is_violation(c.p_value, cfg.p_threshold);
    rep.violation_counter += c.violation ? 1 : 0;
    rep.comparisons.push_back(c);
  }

  if (tc.ground_truth) {
    BaselineReport b;
    for (const auto& source_set : src.sets) {
      b.source_scores.push_back(displacement_scores(source_set, *tc.ground_truth));
    }
    // Follow-up errors are measured against the transformed ground truth and
    // brought back to source units (rescale multiplies every length by s).
    b.followup_scores = detail::divide(displacement_scores(fu_pred, *followup.ground_truth),
                                       scale_ratio(mr, tc.scene));
    for (auto c : kAllCriteria) {
      std::vector<double> src_vals;
      src_vals.reserve(b.source_scores.size());
      for (const auto& s : b.source_scores) src_vals.push_back(score_of(s, c));
      b.decisions[static_cast<std::size_t>(c)] = baseline_criterion(
          src_vals, score_of(b.followup_scores, c), cfg.p_threshold, cfg.sidedness);
    }
    rep.baselines = std::move(b);
  }
  return rep;
}

inline TestCaseReport run_test_case(const SutHandle& sut, const TestCase& tc,
                                    const MetamorphicRelation& mr, const RunConfig& cfg) {
  return evaluate_relation(sut, tc, mr, cfg, prepare_sources(sut, tc, cfg));
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

struct SuiteReport {
  std::string sut_name;
  RunConfig config;
  std::vector<MetamorphicRelation> mrs;
  // reports[m][c]: relation mrs[m] applied to the c-th test case.
  std::vector<std::vector<TestCaseReport>> reports;

  friend bool operator==(const SuiteReport&, const SuiteReport&) = default;
};

struct Tally {
  std::size_t tested = 0;
  std::size_t violations = 0;

  double rate_percent() const {
    return tested == 0 ? 0.0 : 100.0 * static_cast<double>(violations) / static_cast<double>(tested);
  }
};

struct RelationSummary {
  MetamorphicRelation mr;
  std::size_t cases = 0;
  Tally wvc;                          // over (case, source sample) comparisons
  std::array<Tally, 4> baselines{};   // over cases with ground truth, by Criterion
  bool has_baselines = false;
};

inline RelationSummary summarize(const MetamorphicRelation& mr,
                                 std::span<const TestCaseReport> reports) {
  RelationSummary s;
  s.mr = mr;
  s.cases = reports.size();
  for (const auto& r : reports) {
    s.wvc.tested += r.comparisons.size();
    s.wvc.violations += static_cast<std::size_t>(r.violation_counter);
    if (r.baselines) {
      s.has_baselines = true;
      for (auto c : kAllCriteria) {
        auto& t = s.baselines[static_cast<std::size_t>(c)];
        ++t.tested;
        t.violations += (*r.baselines)[c].violation ? 1 : 0;
      }
    }
  }
  return s;
}

inline std::vector<RelationSummary> summarize(const SuiteReport& suite) {
  std::vector<RelationSummary> out;
  for (std::size_t m = 0; m < suite.mrs.size(); ++m) {
    out.push_back(summarize(suite.mrs[m], suite.reports[m]));
  }
  return out;
}

/// Per-case seed: independent of the position of the case in the suite.
inline std::uint64_t case_seed(std::uint64_t suite_seed, std::string_view case_id) {
  return detail::splitmix64(suite_seed ^ detail::fnv1a(case_id));
}

inline unsigned default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Runs every relation on every case. Work is split per test case over
/// `jobs` threads; the report does not depend on the job count.
inline SuiteReport run_suite(const SutHandle& sut, std::span<const TestCase> cases,
                             std::span<const MetamorphicRelation> mrs, const RunConfig& cfg,
                             unsigned jobs = 1) {
  if (cases.empty()) throw Error(ErrorCode::kEmptyInput, "no test cases");
  if (mrs.empty()) throw Error(ErrorCode::kEmptyInput, "no metamorphic relations");
  validate(cfg);

  SutHandle gated = sut;
  if (!sut.concurrent_safe && jobs > 1) {
    auto gate = std::make_shared<std::mutex>();
    gated.invoke = [gate, inner = sut.invoke](const TestCase& tc, int k, std::uint64_t seed) {
      std::lock_guard lock(*gate);
      return inner(tc, k, seed);
    };
  }

  SuiteReport suite;
  suite.sut_name = sut.name;
  suite.config = cfg;
  suite.mrs.assign(mrs.begin(), mrs.end());
  suite.reports.assign(mrs.size(), std::vector<TestCaseReport>(cases.size()));

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(cases.size());
  auto worker = [&] {
    for (std::size_t i = next++; i < cases.size(); i = next++) {
      try {
        RunConfig case_cfg = cfg;
        case_cfg.seed = case_seed(cfg.seed, cases[i].id);
        const auto src = prepare_sources(gated, cases[i], case_cfg);
        for (std::size_t m = 0; m < mrs.size(); ++m) {
          suite.reports[m][i] = evaluate_relation(gated, cases[i], mrs[m], case_cfg, src);
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(cases.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(jobs);
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return suite;
}

}  // namespace mtraj
