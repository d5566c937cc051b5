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

// Synthetic scenes and pedestrian tracks, deterministic given a seed.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "mtraj/dataio.hpp"

namespace mtraj {

struct FixtureOptions {
  int cases = 200;
  // Every agent gets this many consecutive frames: one window in either the
  // short (8 + 12) or the long (5 + 30) setting.
  int track_len = 35;
  double margin = 12.0;  // keeps mirrored and rescaled observations on the map
};

namespace detail {

inline void paint(std::vector<std::uint8_t>& cells, int w, int h, int x0, int y0, int x1, int y1,
                  std::uint8_t cls) {
  x0 = std::clamp(x0, 0, w);
  x1 = std::clamp(x1, 0, w);
  y0 = std::clamp(y0, 0, h);
  y1 = std::clamp(y1, 0, h);
  for (int i = y0; i < y1; ++i) {
    for (int j = x0; j < x1; ++j) cells[static_cast<std::size_t>(i * w + j)] = cls;
  }
}

inline Scene random_scene(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim(160, 240);
  const int w = dim(rng);
  const int h = dim(rng);
  std::vector<std::uint8_t> cells(static_cast<std::size_t>(w * h), kTerrain);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> road_w(8, 18);
  const int roads = 1 + coin(rng) + coin(rng);
  for (int r = 0; r < roads; ++r) {
    const int rw = road_w(rng);
    if (coin(rng)) {
      const int y = std::uniform_int_distribution<int>(0, h - rw)(rng);
      paint(cells, w, h, 0, y - 4, w, y + rw + 4, kPavement);
      paint(cells, w, h, 0, y, w, y + rw, kRoad);
    } else {
      const int x = std::uniform_int_distribution<int>(0, w - rw)(rng);
      paint(cells, w, h, x - 4, 0, x + rw + 4, h, kPavement);
      paint(cells, w, h, x, 0, x + rw, h, kRoad);
    }
  }
  std::uniform_int_distribution<int> blocks(2, 5);
  for (int b = blocks(rng); b > 0; --b) {
    const int bw = std::uniform_int_distribution<int>(6, 30)(rng);
    const int bh = std::uniform_int_distribution<int>(6, 30)(rng);
    const int x = std::uniform_int_distribution<int>(0, w - bw)(rng);
    const int y = std::uniform_int_distribution<int>(0, h - bh)(rng);
    paint(cells, w, h, x, y, x + bw, y + bh, coin(rng) ? kStructure : kObstacle);
  }
  // A background border, as left by the segmentation of a cropped image.
  paint(cells, w, h, 0, 0, w, 2, kBackground);
  paint(cells, w, h, 0, h - 2, w, h, kBackground);
  return Scene(w, h, std::move(cells));
}

// Smooth walk with slowly varying heading and speed.
inline std::vector<Point2> random_walk(std::mt19937_64& rng, const Scene& scene,
                                       const FixtureOptions& opt) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double cx = scene.width() / 2.0;
    const double cy = scene.height() / 2.0;
    const double spread_x = scene.width() / 2.0 - 60.0;
    const double spread_y = scene.height() / 2.0 - 60.0;
    Point2 p{cx + (2 * unit(rng) - 1) * spread_x, cy + (2 * unit(rng) - 1) * spread_y};
    double heading = 2 * std::numbers::pi * unit(rng);
    double speed = 0.6 + 0.9 * unit(rng);
    std::vector<Point2> pts;
    bool inside = true;
    for (int i = 0; i < opt.track_len && inside; ++i) {
      pts.push_back(p);
      inside = p.x >= opt.margin && p.y >= opt.margin && p.x <= scene.width() - opt.margin &&
               p.y <= scene.height() - opt.margin;
      heading += 0.08 * normal(rng);
      speed = std::clamp(speed + 0.05 * normal(rng), 0.3, 2.0);
      p = p + speed * Point2{std::cos(heading), std::sin(heading)};
    }
    if (inside) return pts;
  }
  throw Error(ErrorCode::kInvalidScene, "could not place a track inside the scene");
}

}  // namespace detail

/// At least three scenes and exactly `cases` agents, each contributing one
/// window per setting.
inline Dataset generate_fixtures(std::uint64_t seed, const FixtureOptions& opt = {}) {
  if (opt.cases < 1) throw Error(ErrorCode::kBadFlag, "--cases must be >= 1");
  auto rng = detail::make_rng(seed);
  Dataset ds;
  const int num_scenes = std::clamp(opt.cases / 25, 3, 8);
  for (int s = 0; s < num_scenes; ++s) {
    char id[32];
    std::snprintf(id, sizeof(id), "scene_%02d", s);
    ds.scenes.push_back({id, default_class_names(), detail::random_scene(rng)});
  }
  for (int a = 0; a < opt.cases; ++a) {
    const auto& sf = ds.scenes[static_cast<std::size_t>(a % num_scenes)];
    char agent[32];
    std::snprintf(agent, sizeof(agent), "agent_%04d", a);
    const auto pts = detail::random_walk(rng, sf.scene, opt);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      ds.tracks.push_back({sf.scene_id, agent, static_cast<long long>(i), pts[i].x, pts[i].y});
    }
  }
  return ds;
}

}  // namespace mtraj
