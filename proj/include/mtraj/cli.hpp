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

// Command-line front end. Exit codes: 0 clean, 3 violations (or protocol
// nonconformance) found, 1 operational failure.

#pragma once

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mtraj/dataio.hpp"
#include "mtraj/fixtures.hpp"
#include "mtraj/harness.hpp"
#include "mtraj/report.hpp"
#include "mtraj/sutproto.hpp"
#include "mtraj/transforms.hpp"

#ifndef MTRAJ_GOLDEN_DIR
#define MTRAJ_GOLDEN_DIR "tests/golden"
#endif

namespace mtraj::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitViolations = 3;

/// Fixture seed used by `run` when no --data directory is given.
inline constexpr std::uint64_t kDefaultFixtureSeed = 1;

struct RunOptions {
  std::string sut;
  std::string data;
  std::vector<std::string> mrs;
  int n = 8;
  int k = 20;
  double p_threshold = 0.05;
  std::optional<std::uint64_t> seed;
  std::string setting = "short";
  std::string out;
  bool compat_forward_frame = false;
  bool two_sided = false;
  unsigned jobs = default_jobs();
  double noise = 1.0;
  std::optional<std::vector<double>> drift;
  bool fixed_noise_frame = false;
  double max_violation_rate = 15.0;
  int timeout_ms = 30000;
};

struct AnalyzeOptions {
  std::string report;
  std::string label = "mean-ade";
  std::vector<double> thresholds = default_sweep_thresholds();
  std::string out;
};

struct ConformanceOptions {
  std::string sut = "builtin:echo";
  std::string transcripts = MTRAJ_GOLDEN_DIR;
  int timeout_ms = 30000;
};

struct FixtureCmdOptions {
  std::string out;
  int cases = 200;
  std::optional<std::uint64_t> seed;
};

struct EchoOptions {
  int listen = -1;
};

namespace detail {

inline std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("MTRAJ_SEED"); env != nullptr && *env != '\0') {
    std::uint64_t v = 0;
    const std::string_view s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
      throw Error(ErrorCode::kBadFlag, "MTRAJ_SEED is not an unsigned integer: '" +
                                           std::string(s) + "'");
    }
    return v;
  }
  return 0;
}

inline std::string self_executable() {
  std::error_code ec;
  auto p = std::filesystem::read_symlink("/proc/self/exe", ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot locate own executable");
  return p.string();
}

/// `builtin:echo` in conformance runs this binary's own echo server as a
/// child process, so the transcripts go over a real subprocess transport.
inline std::string transport_uri(const std::string& sut) {
  if (sut == "builtin:echo") return "cmd:'" + self_executable() + "' echo-sut";
  return sut;
}

inline SutHandle resolve_sut(const RunOptions& o) {
  if (o.sut.starts_with("builtin:")) {
    SyntheticParams p;
    p.noise_scale = o.noise;
    p.scale_noise_with_frame = !o.fixed_noise_frame;
    p.drift = {2.0 * o.noise, 2.0 * o.noise};
    if (o.drift) p.drift = {(*o.drift)[0], (*o.drift)[1]};
    return make_builtin_sut(o.sut, p);
  }
  if (o.sut.starts_with("cmd:") || o.sut.starts_with("tcp://")) {
    return sutproto::make_remote_sut(o.sut, std::chrono::milliseconds(o.timeout_ms));
  }
  throw Error(ErrorCode::kUnknownSut, "unknown predictor '" + o.sut +
                                          "' (expected builtin:<name>, cmd:<command> or "
                                          "tcp://host:port)");
}

inline Setting parse_setting(const std::string& s) {
  if (s == "short") return Setting::kShort;
  if (s == "long") return Setting::kLong;
  throw Error(ErrorCode::kBadFlag, "--setting must be short or long");
}

}  // namespace detail

inline int cmd_run(const RunOptions& o, std::ostream& out) {
  // Flag checks happen before any predictor is started.
  const auto setting = detail::parse_setting(o.setting);
  std::string joined;
  for (const auto& m : o.mrs) joined += (joined.empty() ? "" : ",") + m;
  const auto mrs = parse_mr_list(joined);
  if (o.n < 2) throw Error(ErrorCode::kBadFlag, "--n must be >= 2");
  if (o.k < 1) throw Error(ErrorCode::kBadFlag, "--k must be >= 1");
  if (!(o.p_threshold > 0.0 && o.p_threshold < 1.0)) {
    throw Error(ErrorCode::kBadFlag, "--p-threshold must lie in (0, 1)");
  }
  if (o.jobs < 1) throw Error(ErrorCode::kBadFlag, "--jobs must be >= 1");
  if (o.drift && o.drift->size() != 2) throw Error(ErrorCode::kBadFlag, "--drift takes x,y");

  RunConfig cfg = make_run_config(setting);
  cfg.num_sources = o.n;
  cfg.k = o.k;
  cfg.p_threshold = o.p_threshold;
  cfg.seed = detail::resolve_seed(o.seed);
  cfg.sidedness = o.two_sided ? Sidedness::kTwoSided : Sidedness::kUpper;
  cfg.forward_frame = o.compat_forward_frame;

  // Without --data the suite runs on the default generated fixture set.
  const auto ds = o.data.empty() ? generate_fixtures(kDefaultFixtureSeed) : load_dataset(o.data);
  const auto cases = dataset_cases(ds, window_options(setting));
  if (cases.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no " + o.setting + "-term windows in " +
                                            (o.data.empty() ? "the fixture set" : o.data));
  }

  const auto sut = detail::resolve_sut(o);
  const auto suite = run_suite(sut, cases, mrs, cfg, o.jobs);
  if (!o.out.empty()) write_report(suite, o.out);

  const auto rows = summarize(suite);
  out << "sut " << suite.sut_name << ", " << cases.size() << " test cases, N=" << cfg.num_sources
      << ", K=" << cfg.k << ", seed " << cfg.seed << "\n"
      << format_rate_table(rows);
  const bool violated = std::any_of(rows.begin(), rows.end(), [&](const RelationSummary& r) {
    return r.wvc.rate_percent() > o.max_violation_rate;
  });
  return violated ? kExitViolations : kExitOk;
}

inline int cmd_analyze(const AnalyzeOptions& o, std::ostream& out) {
  const auto label = parse_criterion(o.label);
  if (o.thresholds.empty()) throw Error(ErrorCode::kBadFlag, "--thresholds is empty");
  for (double t : o.thresholds) {
    if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorCode::kBadFlag, "thresholds must lie in [0, 1]");
  }
  const auto suite = read_report(o.report);
  const auto csv = sweep_to_csv(threshold_sweep(suite, label, o.thresholds));
  if (!o.out.empty()) {
    mtraj::detail::write_file(o.out, csv);
  }
  out << csv;
  return kExitOk;
}

inline int cmd_conformance(const ConformanceOptions& o, std::ostream& out) {
  std::vector<std::filesystem::path> files;
  if (!std::filesystem::is_directory(o.transcripts)) {
    throw Error(ErrorCode::kIoError, "no transcript directory " + o.transcripts);
  }
  for (const auto& e : std::filesystem::directory_iterator(o.transcripts)) {
    if (e.path().extension() == ".transcript") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error(ErrorCode::kIoError, "no *.transcript files in " + o.transcripts);

  const auto uri = detail::transport_uri(o.sut);
  bool all = true;
  for (const auto& f : files) {
    const auto steps = sutproto::parse_transcript(mtraj::detail::read_file(f), f.string());
    auto transport = sutproto::open_transport(uri);
    const auto res = sutproto::run_transcript(*transport, steps, std::chrono::milliseconds(o.timeout_ms));
    out << (res.passed ? "PASS " : "FAIL ") << f.filename().string()
        << (res.passed ? "" : ": " + res.message) << "\n";
    all = all && res.passed;
  }
  return all ? kExitOk : kExitViolations;
}

inline int cmd_gen_fixtures(const FixtureCmdOptions& o, std::ostream& out) {
  if (o.cases < 1) throw Error(ErrorCode::kBadFlag, "--cases must be >= 1");
  FixtureOptions fo;
  fo.cases = o.cases;
  const auto seed = detail::resolve_seed(o.seed);
  const auto ds = generate_fixtures(seed, fo);
  save_dataset(ds, o.out);
  out << "wrote " << ds.scenes.size() << " scenes and " << o.cases << " tracks to " << o.out
      << "\n";
  return kExitOk;
}

inline int cmd_echo_sut(const EchoOptions& o) {
  const auto predictor = [](const TestCase& tc, int k, std::uint64_t) {
    return echo_predict(tc, k);
  };
  const sutproto::ServerInfo info{"echo", true};
  if (o.listen >= 0) {
    sutproto::TcpListener listener(static_cast<std::uint16_t>(o.listen));
    std::cerr << "listening on 127.0.0.1:" << listener.port() << std::endl;
    while (true) {
      auto conn = listener.accept();
      sutproto::serve(*conn, predictor, info);
    }
  }
  sutproto::FdTransport stdio(STDIN_FILENO, STDOUT_FILENO, false);
  sutproto::serve(stdio, predictor, info);
  return kExitOk;
}

/// Parses and dispatches; `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Metamorphic testing harness for stochastic trajectory predictors", "mtraj"};
  app.require_subcommand(1);

  RunOptions run_opt;
  auto* run_cmd = app.add_subcommand("run", "Run metamorphic tests against a predictor");
  run_cmd->add_option("--sut", run_opt.sut, "builtin:cvg|biased|goal|echo, cmd:<command> or tcp://host:port")
      ->required();
  run_cmd->add_option("--data", run_opt.data, "Dataset directory (scenes/ and tracks.csv); default: 200 generated cases");
  run_cmd->add_option("--mr", run_opt.mrs, "mirror-h, mirror-v, rescale:<factor>; comma separated")
      ->required()
      ->delimiter(',');
  run_cmd->add_option("--n", run_opt.n, "Source predictions per test case")->capture_default_str();
  run_cmd->add_option("--k", run_opt.k, "Samples per prediction")->capture_default_str();
  run_cmd->add_option("--p-threshold", run_opt.p_threshold, "Violation p-value threshold")
      ->capture_default_str();
  run_cmd->add_option("--seed", run_opt.seed, "Suite seed (fallback: MTRAJ_SEED, then 0)");
  run_cmd->add_option("--setting", run_opt.setting, "short (8 observed, 12 future) or long (5, 30)")
      ->capture_default_str();
  run_cmd->add_option("--out", run_opt.out, "Report directory");
  run_cmd->add_flag("--compat-alg1-frame", run_opt.compat_forward_frame,
                    "Compare in the follow-up frame by transforming the source predictions");
  run_cmd->add_flag("--two-sided", run_opt.two_sided, "Two-sided z-test");
  run_cmd->add_option("--jobs", run_opt.jobs, "Worker threads")->capture_default_str();
  run_cmd->add_option("--noise", run_opt.noise, "Built-in predictors: noise per step (px)")
      ->capture_default_str();
  run_cmd->add_option("--drift", run_opt.drift, "builtin:biased: per-step drift x,y (default 2x noise)")
      ->delimiter(',')
      ->expected(2);
  run_cmd->add_flag("--fixed-noise-frame", run_opt.fixed_noise_frame,
                    "Built-in predictors: do not scale noise with the rescale factor");
  run_cmd->add_option("--max-violation-rate", run_opt.max_violation_rate,
                      "Exit 3 when a relation's violation rate (%) exceeds this")
      ->capture_default_str();
  run_cmd->add_option("--timeout-ms", run_opt.timeout_ms, "External predictor reply timeout")
      ->capture_default_str();

  AnalyzeOptions an_opt;
  auto* an_cmd = app.add_subcommand("analyze", "Agreement of WVC with a ground-truth criterion");
  an_cmd->add_option("--report", an_opt.report, "Report directory or records.jsonl")->required();
  an_cmd->add_option("--label", an_opt.label, "mean-ade|mean-fde|bon-ade|bon-fde")->capture_default_str();
  an_cmd->add_option("--thresholds", an_opt.thresholds, "WVC p-value thresholds")->delimiter(',');
  an_cmd->add_option("--out", an_opt.out, "Also write the table to this CSV file");

  ConformanceOptions cf_opt;
  auto* cf_cmd = app.add_subcommand("conformance", "Replay protocol transcripts against a predictor");
  cf_cmd->add_option("--sut", cf_opt.sut, "cmd:<command>, tcp://host:port or builtin:echo")
      ->capture_default_str();
  cf_cmd->add_option("--transcripts", cf_opt.transcripts, "Directory of *.transcript files")
      ->capture_default_str();
  cf_cmd->add_option("--timeout-ms", cf_opt.timeout_ms, "Reply timeout")->capture_default_str();

  FixtureCmdOptions fx_opt;
  auto* fx_cmd = app.add_subcommand("gen-fixtures", "Write a synthetic dataset");
  fx_cmd->add_option("--out", fx_opt.out, "Output directory")->required();
  fx_cmd->add_option("--cases", fx_opt.cases, "Number of test cases")->capture_default_str();
  fx_cmd->add_option("--seed", fx_opt.seed, "Seed (fallback: MTRAJ_SEED, then 0)");

  EchoOptions echo_opt;
  auto* echo_cmd = app.add_subcommand("echo-sut", "Serve the straight-line echo predictor");
  echo_cmd->add_option("--listen", echo_opt.listen, "Serve on this TCP port instead of stdio");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "mtraj: BadFlag: " << e.what() << "\n";
    return kExitFailure;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(run_opt, out);
    if (an_cmd->parsed()) return cmd_analyze(an_opt, out);
    if (cf_cmd->parsed()) return cmd_conformance(cf_opt, out);
    if (fx_cmd->parsed()) return cmd_gen_fixtures(fx_opt, out);
    if (echo_cmd->parsed()) return cmd_echo_sut(echo_opt);
  } catch (const std::exception& e) {
    err << "mtraj: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace mtraj::cli
