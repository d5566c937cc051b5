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

// On-disk formats:
//   scenes   binary PGM (P5, maxval <= 255, pixel = class id) plus a JSON
//            sidecar {scene_id, num_classes, class_names, rescale_factor}
//   tracks   CSV with header `scene_id,agent_id,frame,x,y`
//   reports  a directory holding records.jsonl (one JSON object per line:
//            header, then per case a `case` record followed by its
//            `comparison` records), summary.json and summary.txt

#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mtraj/core.hpp"
#include "mtraj/harness.hpp"
#include "mtraj/report.hpp"
#include "mtraj/transforms.hpp"

namespace mtraj {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Scenes
// ---------------------------------------------------------------------------

struct SceneFile {
  std::string scene_id;
  std::vector<std::string> class_names;
  Scene scene;
};

inline std::vector<std::string> default_class_names() {
  return {"background", "road", "pavement", "terrain", "obstacle", "structure"};
}

namespace detail {

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(ErrorCode::kIoError, "short write to " + path.string());
}

struct PgmImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
};

inline PgmImage parse_pgm(std::string_view data, const std::string& name) {
  std::size_t pos = 0;
  auto fail = [&](const std::string& why) -> Error {
    return Error(ErrorCode::kParseError, name + ": " + why);
  };
  auto skip_space = [&] {
    while (pos < data.size()) {
      if (data[pos] == '#') {
        while (pos < data.size() && data[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(data[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&](const char* what) {
    skip_space();
    int v = 0;
    auto [ptr, ec] = std::from_chars(data.data() + pos, data.data() + data.size(), v);
    if (ec != std::errc{} || ptr == data.data() + pos) throw fail(std::string("bad ") + what);
    pos = static_cast<std::size_t>(ptr - data.data());
    return v;
  };
  if (data.size() < 2 || data.substr(0, 2) != "P5") throw fail("not a binary PGM (P5)");
  pos = 2;
  PgmImage img;
  img.width = read_int("width");
  img.height = read_int("height");
  const int maxval = read_int("maxval");
  if (img.width < 1 || img.height < 1) throw fail("non-positive dimensions");
  if (maxval < 1 || maxval > 255) throw fail("maxval must be in [1, 255]");
  if (pos >= data.size() || !std::isspace(static_cast<unsigned char>(data[pos]))) {
    throw fail("missing whitespace after header");
  }
  ++pos;
  const auto count = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
  if (data.size() - pos < count) {
    throw fail("truncated body: expected " + std::to_string(count) + " bytes, found " +
               std::to_string(data.size() - pos));
  }
  img.pixels.assign(data.begin() + static_cast<std::ptrdiff_t>(pos),
                    data.begin() + static_cast<std::ptrdiff_t>(pos + count));
  return img;
}

}  // namespace detail

inline SceneFile load_scene_file(const fs::path& grid_path, const fs::path& sidecar_path) {
  if (!fs::exists(sidecar_path)) {
    throw Error(ErrorCode::kMissingSidecar, "no sidecar " + sidecar_path.string() + " for " +
                                                grid_path.string());
  }
  const auto img = detail::parse_pgm(detail::read_file(grid_path), grid_path.string());
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(detail::read_file(sidecar_path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, sidecar_path.string() + ": " + e.what());
  }
  SceneFile out{"", {}, Scene::uniform(1, 1, 0)};
  int num_classes = 0;
  double rescale = kDefaultRescaleFactor;
  try {
    out.scene_id = meta.value("scene_id", grid_path.stem().string());
    num_classes = meta.at("num_classes").get<int>();
    rescale = meta.value("rescale_factor", kDefaultRescaleFactor);
    if (meta.contains("class_names")) {
      out.class_names = meta["class_names"].get<std::vector<std::string>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, sidecar_path.string() + ": " + e.what());
  }
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    if (img.pixels[i] >= num_classes) {
      throw Error(ErrorCode::kClassOutOfRange,
                  grid_path.string() + ": pixel " + std::to_string(i) + " has class " +
                      std::to_string(img.pixels[i]) + " but num_classes is " +
                      std::to_string(num_classes));
    }
  }
  try {
    out.scene = Scene(img.width, img.height, img.pixels, num_classes, rescale);
  } catch (const Error& e) {
    throw Error(ErrorCode::kParseError, grid_path.string() + ": " + e.what());
  }
  return out;
}

inline Scene load_scene(const fs::path& grid_path, const fs::path& sidecar_path) {
  return load_scene_file(grid_path, sidecar_path).scene;
}

inline void save_scene(const SceneFile& sf, const fs::path& grid_path,
                       const fs::path& sidecar_path) {
  const auto& s = sf.scene;
  std::string pgm = "P5\n" + std::to_string(s.width()) + " " + std::to_string(s.height()) +
                    "\n255\n";
  pgm.append(s.cells().begin(), s.cells().end());
  detail::write_file(grid_path, pgm);
  nlohmann::json meta = {{"scene_id", sf.scene_id},
                         {"num_classes", s.num_classes()},
                         {"class_names", sf.class_names},
                         {"rescale_factor", s.rescale_factor()}};
  detail::write_file(sidecar_path, meta.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Tracks and windows
// ---------------------------------------------------------------------------

struct TrackRecord {
  std::string scene_id;
  std::string agent_id;
  long long frame = 0;
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const TrackRecord&, const TrackRecord&) = default;
};

namespace detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  while (true) {
    auto comma = line.find(',');
    out.push_back(line.substr(0, comma));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return out;
}

template <typename T>
T parse_number(std::string_view s, const std::string& where) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kParseError, where + ": bad number '" + std::string(s) + "'");
  }
  return v;
}

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

/// Parses the track CSV. Frames must increase strictly per (scene, agent).
inline std::vector<TrackRecord> parse_tracks(std::string_view text, const std::string& name) {
  std::vector<TrackRecord> out;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::map<std::pair<std::string, std::string>, long long> last_frame;
  while (!text.empty()) {
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto where = name + ":" + std::to_string(line_no);
    if (!header_seen) {
      if (line != "scene_id,agent_id,frame,x,y") {
        throw Error(ErrorCode::kParseError, where + ": expected header scene_id,agent_id,frame,x,y");
      }
      header_seen = true;
      continue;
    }
    const auto fields = detail::split_csv(line);
    if (fields.size() != 5) throw Error(ErrorCode::kParseError, where + ": expected 5 fields");
    TrackRecord r{std::string(fields[0]), std::string(fields[1]),
                  detail::parse_number<long long>(fields[2], where),
                  detail::parse_number<double>(fields[3], where),
                  detail::parse_number<double>(fields[4], where)};
    if (!std::isfinite(r.x) || !std::isfinite(r.y)) {
      throw Error(ErrorCode::kParseError, where + ": non-finite coordinate");
    }
    auto key = std::make_pair(r.scene_id, r.agent_id);
    if (auto it = last_frame.find(key); it != last_frame.end() && r.frame <= it->second) {
      throw Error(ErrorCode::kParseError, where + ": frames of agent '" + r.agent_id +
                                              "' are not strictly increasing");
    }
    last_frame[key] = r.frame;
    out.push_back(std::move(r));
  }
  if (!header_seen) throw Error(ErrorCode::kParseError, name + ": empty track file");
  return out;
}

inline std::vector<TrackRecord> load_tracks(const fs::path& path) {
  return parse_tracks(detail::read_file(path), path.string());
}

inline std::string format_tracks(std::span<const TrackRecord> tracks) {
  std::string out = "scene_id,agent_id,frame,x,y\n";
  for (const auto& r : tracks) {
    out += r.scene_id + "," + r.agent_id + "," + std::to_string(r.frame) + "," +
           detail::format_double(r.x) + "," + detail::format_double(r.y) + "\n";
  }
  return out;
}

inline void save_tracks(std::span<const TrackRecord> tracks, const fs::path& path) {
  detail::write_file(path, format_tracks(tracks));
}

struct WindowOptions {
  int observed_len = 8;
  int horizon = 12;
  int stride = 20;
  long long frame_step = 1;  // consecutive samples must be exactly this many frames apart
  double frame_interval = Trajectory::kDefaultFrameInterval;
};

/// Cuts every agent's track into windows of n observed plus T future points.
/// Windows containing a frame gap, referring to an unknown scene, or whose
/// observed part leaves the scene are skipped. Agents are visited in order of
/// first appearance.
inline std::vector<TestCase> extract_windows(std::span<const TrackRecord> tracks,
                                             const std::map<std::string, Scene>& scenes,
                                             const WindowOptions& opt) {
  if (opt.observed_len < 1 || opt.horizon < 1 || opt.stride < 1 || opt.frame_step < 1) {
    throw Error(ErrorCode::kInvalidArgument, "window lengths and stride must be >= 1");
  }
  std::vector<std::pair<std::string, std::string>> order;
  std::map<std::pair<std::string, std::string>, std::vector<const TrackRecord*>> by_agent;
  for (const auto& r : tracks) {
    auto key = std::make_pair(r.scene_id, r.agent_id);
    auto [it, inserted] = by_agent.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&r);
  }

  std::vector<TestCase> out;
  const auto n = static_cast<std::size_t>(opt.observed_len);
  const auto len = n + static_cast<std::size_t>(opt.horizon);
  for (const auto& key : order) {
    const auto scene_it = scenes.find(key.first);
    if (scene_it == scenes.end()) continue;
    auto& pts = by_agent[key];
    std::stable_sort(pts.begin(), pts.end(),
                     [](const TrackRecord* a, const TrackRecord* b) { return a->frame < b->frame; });
    for (std::size_t start = 0; start + len <= pts.size(); start += static_cast<std::size_t>(opt.stride)) {
      bool gap = false;
      for (std::size_t i = start + 1; i < start + len; ++i) {
        if (pts[i]->frame - pts[i - 1]->frame != opt.frame_step) gap = true;
      }
      if (gap) continue;
      std::vector<Point2> obs, fut;
      for (std::size_t i = start; i < start + n; ++i) obs.push_back({pts[i]->x, pts[i]->y});
      for (std::size_t i = start + n; i < start + len; ++i) fut.push_back({pts[i]->x, pts[i]->y});
      TestCase tc{key.first + "/" + key.second + "/" + std::to_string(pts[start]->frame),
                  scene_it->second, Trajectory(std::move(obs), opt.frame_interval),
                  Trajectory(std::move(fut), opt.frame_interval), opt.horizon};
      try {
        validate(tc);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kOutOfBounds) continue;
        throw;
      }
      out.push_back(std::move(tc));
    }
  }
  return out;
}

/// A dataset directory holds `scenes/<id>.pgm` + `scenes/<id>.json` and `tracks.csv`.
struct Dataset {
  std::vector<SceneFile> scenes;
  std::vector<TrackRecord> tracks;
};

inline Dataset load_dataset(const fs::path& dir) {
  Dataset ds;
  const auto scene_dir = dir / "scenes";
  if (!fs::is_directory(scene_dir)) {
    throw Error(ErrorCode::kIoError, "missing directory " + scene_dir.string());
  }
  std::vector<fs::path> grids;
  for (const auto& e : fs::directory_iterator(scene_dir)) {
    if (e.path().extension() == ".pgm") grids.push_back(e.path());
  }
  std::sort(grids.begin(), grids.end());
  for (const auto& g : grids) {
    auto sidecar = g;
    sidecar.replace_extension(".json");
    ds.scenes.push_back(load_scene_file(g, sidecar));
  }
  ds.tracks = load_tracks(dir / "tracks.csv");
  return ds;
}

inline void save_dataset(const Dataset& ds, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir / "scenes", ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + (dir / "scenes").string());
  for (const auto& sf : ds.scenes) {
    save_scene(sf, dir / "scenes" / (sf.scene_id + ".pgm"), dir / "scenes" / (sf.scene_id + ".json"));
  }
  save_tracks(ds.tracks, dir / "tracks.csv");
}

inline std::vector<TestCase> dataset_cases(const Dataset& ds, const WindowOptions& opt) {
  std::map<std::string, Scene> scenes;
  for (const auto& sf : ds.scenes) scenes.emplace(sf.scene_id, sf.scene);
  return extract_windows(ds.tracks, scenes, opt);
}

/// Window options for a forecasting setting; non-overlapping windows.
inline WindowOptions window_options(Setting s) {
  const auto p = preset(s);
  return {p.observed_len, p.horizon, p.observed_len + p.horizon, 1, p.frame_interval};
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline constexpr int kReportSchemaVersion = 1;

namespace detail {

using nlohmann::json;

inline json config_to_json(const RunConfig& c) {
  return {{"n", c.num_sources},
          {"k", c.k},
          {"p_threshold", c.p_threshold},
          {"seed", c.seed},
          {"horizon", c.horizon},
          {"observed_len", c.observed_len},
          {"sidedness", c.sidedness == Sidedness::kUpper ? "upper" : "two-sided"},
          {"forward_frame", c.forward_frame}};
}

inline RunConfig config_from_json(const json& j) {
  RunConfig c;
  c.num_sources = j.at("n").get<int>();
  c.k = j.at("k").get<int>();
  c.p_threshold = j.at("p_threshold").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.horizon = j.at("horizon").get<int>();
  c.observed_len = j.at("observed_len").get<int>();
  const auto side = j.at("sidedness").get<std::string>();
  if (side != "upper" && side != "two-sided") {
    throw Error(ErrorCode::kParseError, "unknown sidedness '" + side + "'");
  }
  c.sidedness = side == "upper" ? Sidedness::kUpper : Sidedness::kTwoSided;
  c.forward_frame = j.at("forward_frame").get<bool>();
  return c;
}

inline json scores_to_json(const DisplacementScores& s) {
  return {{"bon_ade", s.bon_ade}, {"bon_fde", s.bon_fde}, {"mean_ade", s.mean_ade},
          {"mean_fde", s.mean_fde}};
}

inline DisplacementScores scores_from_json(const json& j) {
  return {j.at("bon_ade").get<double>(), j.at("bon_fde").get<double>(),
          j.at("mean_ade").get<double>(), j.at("mean_fde").get<double>()};
}

inline json baselines_to_json(const BaselineReport& b) {
  json sources = json::array();
  for (const auto& s : b.source_scores) sources.push_back(scores_to_json(s));
  json decisions = json::object();
  for (auto c : kAllCriteria) {
    decisions[std::string(to_string(c))] = {{"p_value", b[c].p_value},
                                            {"violation", b[c].violation}};
  }
  return {{"source_scores", sources},
          {"followup_scores", scores_to_json(b.followup_scores)},
          {"decisions", decisions}};
}

inline BaselineReport baselines_from_json(const json& j) {
  BaselineReport b;
  for (const auto& s : j.at("source_scores")) b.source_scores.push_back(scores_from_json(s));
  b.followup_scores = scores_from_json(j.at("followup_scores"));
  for (auto c : kAllCriteria) {
    const auto& d = j.at("decisions").at(std::string(to_string(c)));
    b.decisions[static_cast<std::size_t>(c)] = {d.at("p_value").get<double>(),
                                                d.at("violation").get<bool>()};
  }
  return b;
}

inline json summary_to_json(const RelationSummary& s) {
  json j = {{"mr", to_string(s.mr)},
            {"cases", s.cases},
            {"comparisons", s.wvc.tested},
            {"wvc_violations", s.wvc.violations},
            {"wvc_rate", s.wvc.rate_percent()}};
  if (s.has_baselines) {
    for (auto c : kAllCriteria) {
      const auto& t = s.baselines[static_cast<std::size_t>(c)];
      j[std::string(to_string(c)) + "_rate"] = t.rate_percent();
    }
  }
  return j;
}

}  // namespace detail

/// The comparison records: a header line then, per relation and case, one
/// `case` record followed by its `comparison` records.
inline std::string format_records(const SuiteReport& suite) {
  using detail::json;
  std::string out;
  json mrs = json::array();
  for (const auto& mr : suite.mrs) mrs.push_back(to_string(mr));
  json header = {{"record", "header"},
                 {"schema_version", kReportSchemaVersion},
                 {"sut", suite.sut_name},
                 {"config", detail::config_to_json(suite.config)},
                 {"mrs", mrs}};
  out += header.dump() + "\n";
  for (std::size_t m = 0; m < suite.mrs.size(); ++m) {
    const auto mr_name = to_string(suite.mrs[m]);
    for (const auto& r : suite.reports[m]) {
      json rec = {{"record", "case"},
                  {"mr", mr_name},
                  {"case", r.test_case_id},
                  {"mu_src", r.mu_src},
                  {"sigma_src", r.sigma_src},
                  {"pairwise", r.pairwise},
                  {"violation_counter", r.violation_counter}};
      if (r.baselines) rec["baselines"] = detail::baselines_to_json(*r.baselines);
      out += rec.dump() + "\n";
      for (std::size_t i = 0; i < r.comparisons.size(); ++i) {
        const auto& c = r.comparisons[i];
        json cmp = {{"record", "comparison"}, {"mr", mr_name},       {"case", r.test_case_id},
                    {"source", i},            {"distance", c.distance}, {"p_value", c.p_value},
                    {"violation", c.violation}};
        out += cmp.dump() + "\n";
      }
    }
  }
  return out;
}

inline SuiteReport parse_records(std::string_view text, const std::string& name) {
  using detail::json;
  SuiteReport suite;
  bool have_header = false;
  std::size_t line_no = 0;
  std::map<std::string, std::size_t> mr_index;
  TestCaseReport* current = nullptr;
  while (!text.empty()) {
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (line.empty()) continue;
    const auto where = name + ":" + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParseError, where + ": " + e.what());
    }
    try {
      const auto kind = j.at("record").get<std::string>();
      if (kind == "header") {
        const int version = j.at("schema_version").get<int>();
        if (version != kReportSchemaVersion) {
          throw Error(ErrorCode::kSchemaVersionMismatch,
                      where + ": schema_version " + std::to_string(version) + ", expected " +
                          std::to_string(kReportSchemaVersion));
        }
        suite.sut_name = j.at("sut").get<std::string>();
        suite.config = detail::config_from_json(j.at("config"));
        for (const auto& mr : j.at("mrs")) {
          mr_index[mr.get<std::string>()] = suite.mrs.size();
          suite.mrs.push_back(parse_mr(mr.get<std::string>()));
        }
        suite.reports.resize(suite.mrs.size());
        have_header = true;
        continue;
      }
      if (!have_header) throw Error(ErrorCode::kParseError, where + ": record before header");
      const auto mr_it = mr_index.find(j.at("mr").get<std::string>());
      if (mr_it == mr_index.end()) {
        throw Error(ErrorCode::kParseError, where + ": relation not declared in header");
      }
      if (kind == "case") {
        TestCaseReport r;
        r.test_case_id = j.at("case").get<std::string>();
        r.mr = suite.mrs[mr_it->second];
        r.mu_src = j.at("mu_src").get<double>();
        r.sigma_src = j.at("sigma_src").get<double>();
        r.pairwise = j.at("pairwise").get<std::vector<double>>();
        r.violation_counter = j.at("violation_counter").get<int>();
        if (j.contains("baselines")) r.baselines = detail::baselines_from_json(j["baselines"]);
        suite.reports[mr_it->second].push_back(std::move(r));
        current = &suite.reports[mr_it->second].back();
      } else if (kind == "comparison") {
        if (current == nullptr || current->test_case_id != j.at("case").get<std::string>() ||
            j.at("source").get<std::size_t>() != current->comparisons.size()) {
          throw Error(ErrorCode::kParseError, where + ": comparison out of order");
        }
        current->comparisons.push_back({j.at("distance").get<double>(),
                                        j.at("p_value").get<double>(),
                                        j.at("violation").get<bool>()});
      } else {
        throw Error(ErrorCode::kParseError, where + ": unknown record type '" + kind + "'");
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParseError, where + ": " + e.what());
    }
  }
  if (!have_header) throw Error(ErrorCode::kParseError, name + ": missing header record");
  return suite;
}

inline std::string format_summary(const SuiteReport& suite) {
  using detail::json;
  const auto rows = summarize(suite);
  json rates = json::array();
  for (const auto& r : rows) rates.push_back(detail::summary_to_json(r));
  json j = {{"schema_version", kReportSchemaVersion},
            {"sut", suite.sut_name},
            {"config", detail::config_to_json(suite.config)},
            {"seed", suite.config.seed},
            {"rates", rates},
            {"table", format_rate_table(rows)}};
  return j.dump(2) + "\n";
}

inline fs::path records_path(const fs::path& report_dir) { return report_dir / "records.jsonl"; }

inline void write_report(const SuiteReport& suite, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string() + ": " + ec.message());
  detail::write_file(records_path(dir), format_records(suite));
  detail::write_file(dir / "summary.json", format_summary(suite));
  detail::write_file(dir / "summary.txt", format_rate_table(summarize(suite)));
}

/// Accepts the report directory or the records file itself.
inline SuiteReport read_report(const fs::path& path) {
  const auto file = fs::is_directory(path) ? records_path(path) : path;
  return parse_records(detail::read_file(file), file.string());
}

}  // namespace mtraj
