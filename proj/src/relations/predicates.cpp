// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
#include <algorithm>
#include <cmath>

#include "sgnet/relations.hpp"

namespace sgnet {
namespace {

// Absorbs the rounding of centroids and extents to nine significant digits,
// so boxes that were generated touching still count as touching.
constexpr double kContactTolerance = 1e-6;

}  // namespace

bool footprints_overlap(const SceneObject& a, const SceneObject& b) {
  const double ox = std::min(a.max(0), b.max(0)) - std::max(a.min(0), b.min(0));
  const double oy = std::min(a.max(1), b.max(1)) - std::max(a.min(1), b.min(1));
  return ox > 0.0 && oy > 0.0;
}

double horizontal_gap(const SceneObject& a, const SceneObject& b) {
  const double dx = std::max({0.0, a.min(0) - b.max(0), b.min(0) - a.max(0)});
  const double dy = std::max({0.0, a.min(1) - b.max(1), b.min(1) - a.max(1)});
  return std::hypot(dx, dy);
}

bool detect_supporting(const SceneObject& upper, const SceneObject& lower, const RelationThresholds& t) {
  const double gap = upper.bottom() - lower.top();
  return gap >= -kContactTolerance && gap <= t.support_gap && footprints_overlap(upper, lower);
}

std::vector<std::optional<std::size_t>> supporting_parents(const Scene& scene, const RelationThresholds& t) {
  const auto& objs = scene.objects();
  std::vector<std::optional<std::size_t>> parents(objs.size());
  for (std::size_t i = 0; i < objs.size(); ++i) {
    if (i == scene.floor_index()) continue;
    std::optional<std::size_t> best;
    for (std::size_t j = 0; j < objs.size(); ++j) {
      if (j == i || !detect_supporting(objs[i], objs[j], t)) continue;
      if (!best || objs[j].top() > objs[*best].top() ||
          (objs[j].top() == objs[*best].top() && objs[j].id < objs[*best].id)) {
        best = j;
      }
    }
    parents[i] = best ? best : std::optional<std::size_t>(scene.floor_index());
  }
  return parents;
}

bool detect_next_to(const Scene& scene, std::size_t a, std::size_t b,
                    const std::vector<std::optional<std::size_t>>& parents, const RelationThresholds& t) {
  if (a == b || !parents[a] || !parents[b] || *parents[a] != *parents[b]) return false;
  return horizontal_gap(scene.objects()[a], scene.objects()[b]) <= t.next_to_gap;
}

}  // namespace sgnet
