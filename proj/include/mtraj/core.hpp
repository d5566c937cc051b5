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

// Domain types shared by every part of the harness: points, trajectories,
// segmentation-map scenes, test cases and sampled prediction sets.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mtraj {

enum class ErrorCode {
  kOutOfBounds,
  kLengthMismatch,
  kInvalidScene,
  kInvalidTrajectory,
  kInvalidArgument,
  kDegenerateScene,
  kInvalidMatrix,
  kSizeMismatch,
  kTooFewSets,
  kEmptyInput,
  kEmptySet,
  kSutFailure,
  kTooShortHistory,
  kNoWalkableCells,
  kVersionMismatch,
  kTimeout,
  kMalformedResponse,
  kDimensionMismatch,
  kRemoteError,
  kTransportError,
  kParseError,
  kClassOutOfRange,
  kMissingSidecar,
  kIoError,
  kSchemaVersionMismatch,
  kMissingBaselines,
  kUnknownSut,
  kBadFlag,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOutOfBounds: return "OutOfBounds";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kInvalidScene: return "InvalidScene";
    case ErrorCode::kInvalidTrajectory: return "InvalidTrajectory";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDegenerateScene: return "DegenerateScene";
    case ErrorCode::kInvalidMatrix: return "InvalidMatrix";
    case ErrorCode::kSizeMismatch: return "SizeMismatch";
    case ErrorCode::kTooFewSets: return "TooFewSets";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kEmptySet: return "EmptySet";
    case ErrorCode::kSutFailure: return "SutFailure";
    case ErrorCode::kTooShortHistory: return "TooShortHistory";
    case ErrorCode::kNoWalkableCells: return "NoWalkableCells";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kTimeout: return "Timeout";
    case ErrorCode::kMalformedResponse: return "MalformedResponse";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kRemoteError: return "RemoteError";
    case ErrorCode::kTransportError: return "TransportError";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kClassOutOfRange: return "ClassOutOfRange";
    case ErrorCode::kMissingSidecar: return "MissingSidecar";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kSchemaVersionMismatch: return "SchemaVersionMismatch";
    case ErrorCode::kMissingBaselines: return "MissingBaselines";
    case ErrorCode::kUnknownSut: return "UnknownSut";
    case ErrorCode::kBadFlag: return "BadFlag";
  }
  return "Unknown";
}

// All harness failures are reported as mtraj::Error carrying a stable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  bool finite() const { return std::isfinite(x) && std::isfinite(y); }

  friend bool operator==(const Point2&, const Point2&) = default;
  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
};

inline double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Ordered 2-D positions in pixel units, one per frame.
///
/// frame_interval is carried as metadata; every computation in the harness
/// works per timestep.
class Trajectory {
 public:
  static constexpr double kDefaultFrameInterval = 0.4;

  explicit Trajectory(std::vector<Point2> points,
                      double frame_interval = kDefaultFrameInterval)
      : points_(std::move(points)), frame_interval_(frame_interval) {
    if (points_.empty()) {
      throw Error(ErrorCode::kInvalidTrajectory, "trajectory needs at least one point");
    }
    if (!(frame_interval_ > 0.0) || !std::isfinite(frame_interval_)) {
      throw Error(ErrorCode::kInvalidTrajectory, "frame_interval must be finite and > 0");
    }
    for (const auto& p : points_) {
      if (!p.finite()) {
        throw Error(ErrorCode::kInvalidTrajectory, "trajectory point is not finite");
      }
    }
  }

  std::span<const Point2> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  const Point2& operator[](std::size_t i) const { return points_[i]; }
  const Point2& back() const { return points_.back(); }
  double frame_interval() const { return frame_interval_; }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;

 private:
  std::vector<Point2> points_;
  double frame_interval_;
};

/// Default class catalogue of a segmentation map. Ids are configurable per
/// scene file; only the count (five area types plus background) is fixed.
enum SceneClass : std::uint8_t {
  kBackground = 0,
  kRoad = 1,
  kPavement = 2,
  kTerrain = 3,
  kObstacle = 4,
  kStructure = 5,
};

inline constexpr int kDefaultNumClasses = 6;
inline constexpr double kDefaultRescaleFactor = 0.25;

/// Row-major grid of class ids. Cell (row i, column j) covers
/// [j, j+1) x [i, i+1) in pixel coordinates.
class Scene {
 public:
  Scene(int width, int height, std::vector<std::uint8_t> cells,
        int num_classes = kDefaultNumClasses,
        double rescale_factor = kDefaultRescaleFactor)
      : width_(width),
        height_(height),
        num_classes_(num_classes),
        rescale_factor_(rescale_factor),
        cells_(std::move(cells)) {
    if (width_ < 1 || height_ < 1) {
      throw Error(ErrorCode::kInvalidScene, "scene dimensions must be >= 1");
    }
    if (num_classes_ < 1 || num_classes_ > 256) {
      throw Error(ErrorCode::kInvalidScene, "num_classes must be in [1, 256]");
    }
    if (!(rescale_factor_ > 0.0) || !std::isfinite(rescale_factor_)) {
      throw Error(ErrorCode::kInvalidScene, "rescale_factor must be finite and > 0");
    }
    if (cells_.size() != static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_)) {
      throw Error(ErrorCode::kInvalidScene, "cell count does not match width x height");
    }
    for (auto c : cells_) {
      if (c >= num_classes_) {
        throw Error(ErrorCode::kInvalidScene,
                    "class id " + std::to_string(c) + " >= num_classes");
      }
    }
  }

  /// Scene filled with a single class.
  static Scene uniform(int width, int height, std::uint8_t cls,
                       int num_classes = kDefaultNumClasses,
                       double rescale_factor = kDefaultRescaleFactor) {
    return Scene(width, height,
                 std::vector<std::uint8_t>(
                     static_cast<std::size_t>(std::max(width, 0)) *
                         static_cast<std::size_t>(std::max(height, 0)),
                     cls),
                 num_classes, rescale_factor);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  int num_classes() const { return num_classes_; }
  double rescale_factor() const { return rescale_factor_; }
  std::span<const std::uint8_t> cells() const { return cells_; }
  std::uint8_t at(int row, int col) const {
    return cells_[static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
                  static_cast<std::size_t>(col)];
  }

  bool contains(Point2 p) const {
    return p.x >= 0.0 && p.y >= 0.0 && p.x < width_ && p.y < height_;
  }

  friend bool operator==(const Scene&, const Scene&) = default;

 private:
  int width_;
  int height_;
  int num_classes_;
  double rescale_factor_;
  std::vector<std::uint8_t> cells_;
};

struct TestCase {
  std::string id;
  Scene scene;
  Trajectory observed;
  std::optional<Trajectory> ground_truth;
  int horizon = 1;

  friend bool operator==(const TestCase&, const TestCase&) = default;
};

/// Checks every TestCase invariant; throws mtraj::Error on the first failure.
inline void validate(const TestCase& tc) {
  if (tc.horizon < 1) {
    throw Error(ErrorCode::kInvalidArgument, "horizon must be >= 1");
  }
  for (std::size_t i = 0; i < tc.observed.size(); ++i) {
    const auto& p = tc.observed[i];
    if (!tc.scene.contains(p)) {
      throw Error(ErrorCode::kOutOfBounds,
                  "observed point " + std::to_string(i) + " (" + std::to_string(p.x) + ", " +
                      std::to_string(p.y) + ") lies outside the " +
                      std::to_string(tc.scene.width()) + "x" +
                      std::to_string(tc.scene.height()) + " scene");
    }
  }
  if (tc.ground_truth && tc.ground_truth->size() != static_cast<std::size_t>(tc.horizon)) {
    throw Error(ErrorCode::kLengthMismatch,
                "ground truth has " + std::to_string(tc.ground_truth->size()) +
                    " points, horizon is " + std::to_string(tc.horizon));
  }
}

namespace detail {

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[v & 0xF];
    v >>= 4;
  }
  return out;
}

}  // namespace detail

/// Builds a validated test case. An empty id is replaced by a content hash of
/// the observed trajectory and scene size, so identical inputs get identical ids.
inline TestCase make_test_case(Scene scene, Trajectory observed,
                               std::optional<Trajectory> ground_truth, int horizon,
                               std::string id = {}) {
  if (id.empty()) {
    std::string key = std::to_string(scene.width()) + "x" + std::to_string(scene.height());
    for (const auto& p : observed.points()) {
      key += ";" + std::to_string(p.x) + "," + std::to_string(p.y);
    }
    id = "tc-" + detail::hex64(detail::fnv1a(key));
  }
  TestCase tc{std::move(id), std::move(scene), std::move(observed), std::move(ground_truth),
              horizon};
  validate(tc);
  return tc;
}

/// K sampled future trajectories of identical length from one predictor call.
class PredictionSet {
 public:
  explicit PredictionSet(std::vector<Trajectory> trajectories)
      : trajectories_(std::move(trajectories)) {
    if (trajectories_.empty()) {
      throw Error(ErrorCode::kEmptySet, "prediction set needs at least one trajectory");
    }
    const auto horizon = trajectories_.front().size();
    for (const auto& t : trajectories_) {
      if (t.size() != horizon) {
        throw Error(ErrorCode::kLengthMismatch,
                    "prediction set members have different lengths");
      }
    }
  }

  std::span<const Trajectory> trajectories() const { return trajectories_; }
  std::size_t size() const { return trajectories_.size(); }
  std::size_t horizon() const { return trajectories_.front().size(); }
  const Trajectory& operator[](std::size_t i) const { return trajectories_[i]; }

  friend bool operator==(const PredictionSet&, const PredictionSet&) = default;

 private:
  std::vector<Trajectory> trajectories_;
};

enum class Sidedness { kUpper, kTwoSided };

struct RunConfig {
  int num_sources = 8;  // N
  int k = 20;           // samples per prediction
  double p_threshold = 0.05;
  std::uint64_t seed = 0;
  int horizon = 12;       // T
  int observed_len = 8;   // n
  Sidedness sidedness = Sidedness::kUpper;
  // Compare in the follow-up frame exactly as the original test procedure
  // does, instead of mapping the follow-up prediction back to the source frame.
  bool forward_frame = false;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

inline void validate(const RunConfig& cfg) {
  if (cfg.num_sources < 2) {
    throw Error(ErrorCode::kTooFewSets, "N must be >= 2");
  }
  if (cfg.k < 1) throw Error(ErrorCode::kInvalidArgument, "K must be >= 1");
  if (!(cfg.p_threshold > 0.0 && cfg.p_threshold < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "p_threshold must lie in (0, 1)");
  }
  if (cfg.horizon < 1) throw Error(ErrorCode::kInvalidArgument, "horizon must be >= 1");
  if (cfg.observed_len < 1) throw Error(ErrorCode::kInvalidArgument, "observed_len must be >= 1");
}

enum class Setting { kShort, kLong };

struct SettingPreset {
  int observed_len;
  int horizon;
  double frame_interval;
};

// Short term: 3.2 s history at 2.5 FPS, 4.8 s horizon. Long term: 5 s at 1 FPS, 30 s horizon.
inline constexpr SettingPreset preset(Setting s) {
  return s == Setting::kShort ? SettingPreset{8, 12, 0.4} : SettingPreset{5, 30, 1.0};
}

inline RunConfig make_run_config(Setting s) {
  RunConfig cfg;
  cfg.observed_len = preset(s).observed_len;
  cfg.horizon = preset(s).horizon;
  return cfg;
}

}  // namespace mtraj
