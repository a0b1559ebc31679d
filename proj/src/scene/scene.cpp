// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "sgnet/scene.hpp"

namespace sgnet {
namespace {

std::string field(std::size_t i, const char* name) {
  return "objects[" + std::to_string(i) + "]." + name;
}

}  // namespace

Scene::Scene(std::string room_type, std::shared_ptr<const CategoryVocab> vocab, Bounds bounds,
             std::vector<SceneObject> objects)
    : room_type_(std::move(room_type)),
      vocab_(std::move(vocab)),
      bounds_(bounds),
      objects_(std::move(objects)) {
  if (!vocab_) throw SceneError("vocab", "missing vocabulary");
  for (int a = 0; a < 2; ++a) {
    const auto& r = a == 0 ? bounds_.x : bounds_.y;
    const std::string path = a == 0 ? "bounds.x" : "bounds.y";
    if (!std::isfinite(r[0]) || !std::isfinite(r[1]) || !(r[0] < r[1])) {
      throw SceneError(path, "bounds must be finite with min < max");
    }
  }

  std::set<std::string> ids;
  int floors = 0;
  int walls = 0;
  for (std::size_t i = 0; i < objects_.size(); ++i) {
    const SceneObject& o = objects_[i];
    if (o.id.empty()) throw SceneError(field(i, "id"), "empty id");
    if (!ids.insert(o.id).second) throw SceneError(field(i, "id"), "duplicate id '" + o.id + "'");
    if (o.category < 0 || o.category >= vocab_->size()) {
      throw SceneError(field(i, "category"), "category index out of range");
    }
    for (int a = 0; a < 3; ++a) {
      if (!std::isfinite(o.position[a])) {
        throw SceneError(field(i, "position") + "[" + std::to_string(a) + "]", "non-finite position");
      }
      if (!std::isfinite(o.size[a]) || !(o.size[a] > 0.0)) {
        throw SceneError(field(i, "size") + "[" + std::to_string(a) + "]", "size must be positive");
      }
    }
    if (o.category == vocab_->floor_index()) {
      ++floors;
      floor_ = i;
    } else {
      if (o.category == vocab_->wall_index()) ++walls;
      if (!bounds_.contains_xy(o.position[0], o.position[1])) {
        throw SceneError(field(i, "position"), "object '" + o.id + "' lies outside the room bounds");
      }
    }
  }
  if (floors != 1) {
    throw SceneError("objects", floors == 0 ? "scene has no floor object" : "scene has more than one floor object");
  }
  if (walls < 1) throw SceneError("objects", "scene has no wall object");
}

std::optional<std::size_t> Scene::find(const std::string& id) const {
  for (std::size_t i = 0; i < objects_.size(); ++i) {
    if (objects_[i].id == id) return i;
  }
  return std::nullopt;
}

bool Scene::is_removable(std::size_t index) const {
  return index < objects_.size() && !vocab_->is_structural(objects_[index].category);
}

std::vector<std::size_t> Scene::removable_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < objects_.size(); ++i) {
    if (is_removable(i)) out.push_back(i);
  }
  return out;
}

Scene Scene::without(std::size_t index) const {
  if (index >= objects_.size()) throw std::out_of_range("object index out of range");
  std::vector<SceneObject> rest;
  rest.reserve(objects_.size() - 1);
  for (std::size_t i = 0; i < objects_.size(); ++i) {
    if (i != index) rest.push_back(objects_[i]);
  }
  return Scene(room_type_, vocab_, bounds_, std::move(rest));
}

Scene Scene::with_object(SceneObject object) const {
  std::vector<SceneObject> all = objects_;
  all.push_back(std::move(object));
  return Scene(room_type_, vocab_, bounds_, std::move(all));
}

bool Scene::operator==(const Scene& other) const {
  return room_type_ == other.room_type_ && *vocab_ == *other.vocab_ && bounds_ == other.bounds_ &&
         objects_ == other.objects_;
}

TrainingSample make_training_sample_at(const Scene& scene, std::size_t index) {
  if (!scene.is_removable(index)) {
    throw std::invalid_argument("object is not removable (floor, wall or out of range)");
  }
  const SceneObject& target = scene.objects()[index];
  return TrainingSample{scene.without(index), target.id, target.category, target.size, target.position};
}

TrainingSample make_training_sample(const Scene& scene, Rng& rng) {
  const auto candidates = scene.removable_indices();
  if (candidates.empty()) throw std::invalid_argument("scene has no removable objects");
  return make_training_sample_at(scene, candidates[uniform_index(rng, candidates.size())]);
}

std::size_t uniform_index(Rng& rng, std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index over an empty range");
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return static_cast<std::size_t>(draw % bound);
}

double uniform_real(Rng& rng, double lo, double hi) {
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

}  // namespace sgnet
