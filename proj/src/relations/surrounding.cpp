// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "sgnet/relations.hpp"

namespace sgnet {
namespace {

bool similar_size(const SceneObject& a, const SceneObject& b, double ratio) {
  for (int axis = 0; axis < 3; ++axis) {
    const double lo = std::min(a.size[axis], b.size[axis]);
    const double hi = std::max(a.size[axis], b.size[axis]);
    if (!(hi < ratio * lo)) return false;
  }
  return true;
}

double distance(const Vec3& a, const Vec3& b) {
  return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]));
}

Vec3 rotate_about(const Vec3& p, const Vec3& c, double angle) {
  const double s = std::sin(angle);
  const double co = std::cos(angle);
  const double dx = p[0] - c[0];
  const double dy = p[1] - c[1];
  return {c[0] + co * dx - s * dy, c[1] + s * dx + co * dy, p[2]};
}

class RotationSearch {
 public:
  RotationSearch(const std::vector<SceneObject>& objects, const std::vector<std::size_t>& group,
                 const Vec3& center, int n, const RelationThresholds& t)
      : objects_(objects), t_(t) {
    const double angle = 2.0 * std::numbers::pi / n;
    for (std::size_t a : group) {
      const Vec3 image = rotate_about(objects[a].position, center, angle);
      std::vector<std::size_t> targets;
      for (std::size_t b : group) {
        if (b != a && similar_size(objects[a], objects[b], t.surround_size_ratio) &&
            distance(image, objects[b].position) <= t.surround_match) {
          targets.push_back(b);
        }
      }
      if (!targets.empty()) {
        partners_.emplace(a, std::move(targets));
        pool_.push_back(a);
      }
    }
    size_ = static_cast<std::size_t>(n);
  }

  void collect(std::set<std::size_t>& out) {
    if (pool_.size() < size_) return;
    chosen_.clear();
    dfs(0, out);
  }

 private:
  void dfs(std::size_t start, std::set<std::size_t>& out) {
    if (chosen_.size() == size_) {
      for (std::size_t a : chosen_) {
        const auto& targets = partners_.at(a);
        const bool matched = std::any_of(targets.begin(), targets.end(), [&](std::size_t b) {
          return std::find(chosen_.begin(), chosen_.end(), b) != chosen_.end();
        });
        if (!matched) return;
      }
      out.insert(chosen_.begin(), chosen_.end());
      return;
    }
    for (std::size_t k = start; k + (size_ - chosen_.size()) <= pool_.size(); ++k) {
      const std::size_t cand = pool_[k];
      const bool compatible = std::all_of(chosen_.begin(), chosen_.end(), [&](std::size_t c) {
        return similar_size(objects_[c], objects_[cand], t_.surround_size_ratio);
      });
      if (!compatible) continue;
      chosen_.push_back(cand);
      dfs(k + 1, out);
      chosen_.pop_back();
    }
  }

  const std::vector<SceneObject>& objects_;
  const RelationThresholds& t_;
  std::map<std::size_t, std::vector<std::size_t>> partners_;
  std::vector<std::size_t> pool_;
  std::vector<std::size_t> chosen_;
  std::size_t size_ = 0;
};

}  // namespace

std::vector<std::size_t> find_surrounders(const std::vector<SceneObject>& objects,
                                          const std::vector<std::optional<std::size_t>>& parents,
                                          std::optional<std::size_t> exclude, const Vec3& center,
                                          const RelationThresholds& t) {
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    if ((exclude && i == *exclude) || !parents[i]) continue;
    groups[*parents[i]].push_back(i);
  }

  std::set<std::size_t> found;
  for (const auto& [parent, group] : groups) {
    if (group.size() < 2) continue;
    // Any mirror-closed set decomposes into mirror pairs, so pairs suffice.
    for (std::size_t x = 0; x < group.size(); ++x) {
      for (std::size_t y = x + 1; y < group.size(); ++y) {
        const SceneObject& a = objects[group[x]];
        const SceneObject& b = objects[group[y]];
        if (!similar_size(a, b, t.surround_size_ratio)) continue;
        const Vec3 mirror_x{2 * center[0] - a.position[0], a.position[1], a.position[2]};
        const Vec3 mirror_y{a.position[0], 2 * center[1] - a.position[1], a.position[2]};
        if (distance(mirror_x, b.position) <= t.surround_match || distance(mirror_y, b.position) <= t.surround_match) {
          found.insert(group[x]);
          found.insert(group[y]);
        }
      }
    }
    const int max_n = std::min<int>(t.max_surround_set, static_cast<int>(group.size()));
    for (int n = 2; n <= max_n; ++n) {
      RotationSearch search(objects, group, center, n, t);
      search.collect(found);
    }
  }
  return {found.begin(), found.end()};
}

std::vector<SurroundingSet> detect_surrounding(const Scene& scene, const RelationThresholds& t) {
  const auto parents = supporting_parents(scene, t);
  std::vector<SurroundingSet> out;
  const auto& objs = scene.objects();
  for (std::size_t c = 0; c < objs.size(); ++c) {
    auto members = find_surrounders(objs, parents, c, objs[c].position, t);
    if (!members.empty()) out.push_back({c, std::move(members)});
  }
  return out;
}

}  // namespace sgnet
