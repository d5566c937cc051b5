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

// Label-preserving metamorphic relations on test cases: mirroring the scene
// along either axis and changing its rescale factor. Every relation comes
// with the matching point map for predictions and its exact inverse.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mtraj/core.hpp"

namespace mtraj {

enum class MrKind {
  kMirrorH,  // y' = (H - 1) - y, row order reversed
  kMirrorV,  // x' = (W - 1) - x, column order reversed
  kRescale,  // coordinates scaled by target / current rescale factor
};

struct MetamorphicRelation {
  MrKind kind = MrKind::kMirrorV;
  double param = 0.0;  // target rescale factor; unused for mirrors

  static MetamorphicRelation mirror_h() { return {MrKind::kMirrorH, 0.0}; }
  static MetamorphicRelation mirror_v() { return {MrKind::kMirrorV, 0.0}; }
  static MetamorphicRelation rescale(double target) {
    if (!(target > 0.0) || !std::isfinite(target)) {
      throw Error(ErrorCode::kInvalidArgument, "rescale factor must be finite and > 0");
    }
    return {MrKind::kRescale, target};
  }

  friend bool operator==(const MetamorphicRelation&, const MetamorphicRelation&) = default;
};

namespace detail {

inline std::string format_factor(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

/// CLI/config spelling: `mirror-h`, `mirror-v`, `rescale:<factor>`.
inline std::string to_string(const MetamorphicRelation& mr) {
  switch (mr.kind) {
    case MrKind::kMirrorH: return "mirror-h";
    case MrKind::kMirrorV: return "mirror-v";
    case MrKind::kRescale: return "rescale:" + detail::format_factor(mr.param);
  }
  return "unknown";
}

inline MetamorphicRelation parse_mr(std::string_view text) {
  if (text == "mirror-h") return MetamorphicRelation::mirror_h();
  if (text == "mirror-v") return MetamorphicRelation::mirror_v();
  constexpr std::string_view kRescalePrefix = "rescale:";
  if (text.starts_with(kRescalePrefix)) {
    auto num = text.substr(kRescalePrefix.size());
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), value);
    if (ec != std::errc{} || ptr != num.data() + num.size()) {
      throw Error(ErrorCode::kBadFlag, "bad rescale factor in '" + std::string(text) + "'");
    }
    try {
      return MetamorphicRelation::rescale(value);
    } catch (const Error& e) {
      throw Error(ErrorCode::kBadFlag, e.what());
    }
  }
  throw Error(ErrorCode::kBadFlag, "unknown metamorphic relation '" + std::string(text) +
                                       "' (expected mirror-h, mirror-v or rescale:<factor>)");
}

/// Comma-separated list of relations, e.g. "mirror-v,rescale:0.2".
inline std::vector<MetamorphicRelation> parse_mr_list(std::string_view text) {
  if (text.empty()) throw Error(ErrorCode::kBadFlag, "empty metamorphic relation list");
  std::vector<MetamorphicRelation> out;
  while (true) {
    auto comma = text.find(',');
    out.push_back(parse_mr(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

/// Ratio by which coordinates are multiplied when `mr` is applied to a test
/// case whose scene carries `source_scene`'s rescale factor. 1 for mirrors.
inline double scale_ratio(const MetamorphicRelation& mr, const Scene& source_scene) {
  return mr.kind == MrKind::kRescale ? mr.param / source_scene.rescale_factor() : 1.0;
}

/// Forward point map of `mr` in the frame of `source_scene`.
inline Point2 transform_point(const MetamorphicRelation& mr, const Scene& source_scene,
                              Point2 p) {
  switch (mr.kind) {
    case MrKind::kMirrorH:
      return {p.x, (source_scene.height() - 1) - p.y};
    case MrKind::kMirrorV:
      return {(source_scene.width() - 1) - p.x, p.y};
    case MrKind::kRescale: {
      const double s = scale_ratio(mr, source_scene);
      return {p.x * s, p.y * s};
    }
  }
  return p;
}

inline Point2 inverse_transform_point(const MetamorphicRelation& mr, const Scene& source_scene,
                                      Point2 p) {
  if (mr.kind == MrKind::kRescale) {
    const double s = scale_ratio(mr, source_scene);
    return {p.x / s, p.y / s};
  }
  return transform_point(mr, source_scene, p);
}

namespace detail {

template <typename PointMap>
Trajectory map_trajectory(const Trajectory& t, PointMap&& f) {
  std::vector<Point2> pts;
  pts.reserve(t.size());
  for (const auto& p : t.points()) pts.push_back(f(p));
  return Trajectory(std::move(pts), t.frame_interval());
}

template <typename PointMap>
PredictionSet map_predictions(const PredictionSet& preds, PointMap&& f) {
  std::vector<Trajectory> out;
  out.reserve(preds.size());
  for (const auto& t : preds.trajectories()) out.push_back(map_trajectory(t, f));
  return PredictionSet(std::move(out));
}

inline Scene transform_scene(const MetamorphicRelation& mr, const Scene& scene) {
  const int w = scene.width();
  const int h = scene.height();
  std::vector<std::uint8_t> cells;
  switch (mr.kind) {
    case MrKind::kMirrorH:
      cells.reserve(scene.cells().size());
      for (int i = h - 1; i >= 0; --i) {
        for (int j = 0; j < w; ++j) cells.push_back(scene.at(i, j));
      }
      return Scene(w, h, std::move(cells), scene.num_classes(), scene.rescale_factor());
    case MrKind::kMirrorV:
      cells.reserve(scene.cells().size());
      for (int i = 0; i < h; ++i) {
        for (int j = w - 1; j >= 0; --j) cells.push_back(scene.at(i, j));
      }
      return Scene(w, h, std::move(cells), scene.num_classes(), scene.rescale_factor());
    case MrKind::kRescale: {
      const double s = scale_ratio(mr, scene);
      const auto new_h = static_cast<long long>(std::llround(h * s));
      const auto new_w = static_cast<long long>(std::llround(w * s));
      if (new_h < 1 || new_w < 1) {
        throw Error(ErrorCode::kDegenerateScene,
                    "rescaling a " + std::to_string(w) + "x" + std::to_string(h) +
                        " scene by " + std::to_string(s) + " leaves no cells");
      }
      if (new_h * new_w > (1LL << 31)) {
        throw Error(ErrorCode::kDegenerateScene, "rescaled scene is too large");
      }
      // Nearest neighbour on cell centres keeps the class alphabet intact.
      cells.reserve(static_cast<std::size_t>(new_h * new_w));
      for (long long i = 0; i < new_h; ++i) {
        const auto src_i = std::min<long long>(
            h - 1, static_cast<long long>((static_cast<double>(i) + 0.5) * h / new_h));
        for (long long j = 0; j < new_w; ++j) {
          const auto src_j = std::min<long long>(
              w - 1, static_cast<long long>((static_cast<double>(j) + 0.5) * w / new_w));
          cells.push_back(scene.at(static_cast<int>(src_i), static_cast<int>(src_j)));
        }
      }
      return Scene(static_cast<int>(new_w), static_cast<int>(new_h), std::move(cells),
                   scene.num_classes(), mr.param);
    }
  }
  return scene;
}

}  // namespace detail

/// Builds the follow-up test case. The ground truth, when present, moves with
/// the same point map as the observed trajectory. The result is re-validated,
/// so a point pushed off the map raises OutOfBounds.
inline TestCase transform_input(const MetamorphicRelation& mr, const TestCase& tc) {
  const auto f = [&](Point2 p) { return transform_point(mr, tc.scene, p); };
  TestCase out{tc.id + "/" + to_string(mr), detail::transform_scene(mr, tc.scene),
               detail::map_trajectory(tc.observed, f), std::nullopt, tc.horizon};
  if (tc.ground_truth) out.ground_truth = detail::map_trajectory(*tc.ground_truth, f);
  validate(out);
  return out;
}

/// Maps source-frame predictions into the follow-up frame.
inline PredictionSet transform_output(const MetamorphicRelation& mr, const PredictionSet& preds,
                                      const Scene& source_scene) {
  return detail::map_predictions(
      preds, [&](Point2 p) { return transform_point(mr, source_scene, p); });
}

/// Maps follow-up-frame predictions back into the source frame.
inline PredictionSet inverse_transform_output(const MetamorphicRelation& mr,
                                              const PredictionSet& preds,
                                              const Scene& source_scene) {
  return detail::map_predictions(
      preds, [&](Point2 p) { return inverse_transform_point(mr, source_scene, p); });
}

inline Trajectory transform_trajectory(const MetamorphicRelation& mr, const Trajectory& t,
                                       const Scene& source_scene) {
  return detail::map_trajectory(
      t, [&](Point2 p) { return transform_point(mr, source_scene, p); });
}

}  // namespace mtraj
