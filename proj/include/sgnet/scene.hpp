// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
//
// Scene data model: category vocabulary, axis-aligned boxes, scenes and the
// remove-one-object training sample.
#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace sgnet {

using Vec3 = std::array<double, 3>;
using Rng = std::mt19937_64;

/// Thrown for any scene that fails to parse or violates a scene invariant.
/// `path()` names the offending field, e.g. "objects[3].size[1]".
class SceneError : public std::runtime_error {
 public:
  SceneError(std::string path, std::string detail)
      : std::runtime_error(path.empty() ? detail : path + ": " + detail),
        path_(std::move(path)),
        detail_(std::move(detail)) {}
  const std::string& path() const noexcept { return path_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string path_;
  std::string detail_;
};

class CategoryVocab {
 public:
  static constexpr const char* kFloor = "floor";
  static constexpr const char* kWall = "wall";

  /// Requires unique names, at least three entries, and both "floor" and "wall".
  explicit CategoryVocab(std::vector<std::string> names);

  int size() const noexcept { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(int index) const;
  int index(const std::string& name) const;
  std::optional<int> find(const std::string& name) const;
  int floor_index() const noexcept { return floor_; }
  int wall_index() const noexcept { return wall_; }
  bool is_structural(int index) const noexcept { return index == floor_ || index == wall_; }

  /// FNV-1a over the newline-joined names.
  std::uint64_t hash() const noexcept { return hash_; }
  std::string hash_hex() const;

  bool operator==(const CategoryVocab& other) const { return names_ == other.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> lookup_;
  int floor_ = -1;
  int wall_ = -1;
  std::uint64_t hash_ = 0;
};

struct SceneObject {
  std::string id;
  int category = 0;
  Vec3 position{};  // centroid, meters
  Vec3 size{};      // axis-aligned extents, meters

  double bottom() const noexcept { return position[2] - 0.5 * size[2]; }
  double top() const noexcept { return position[2] + 0.5 * size[2]; }
  double min(int axis) const noexcept { return position[axis] - 0.5 * size[axis]; }
  double max(int axis) const noexcept { return position[axis] + 0.5 * size[axis]; }

  bool operator==(const SceneObject&) const = default;
};

struct Bounds {
  std::array<double, 2> x{};
  std::array<double, 2> y{};

  bool contains_xy(double px, double py, double tol = 1e-9) const noexcept {
    return px >= x[0] - tol && px <= x[1] + tol && py >= y[0] - tol && py <= y[1] + tol;
  }
  bool operator==(const Bounds&) const = default;
};

/// Validated, immutable scene. Exactly one floor, at least one wall, unique
/// ids, positive sizes, and every non-floor centroid inside `bounds`.
class Scene {
 public:
  Scene(std::string room_type, std::shared_ptr<const CategoryVocab> vocab, Bounds bounds,
        std::vector<SceneObject> objects);

  const std::string& room_type() const noexcept { return room_type_; }
  const CategoryVocab& vocab() const noexcept { return *vocab_; }
  const std::shared_ptr<const CategoryVocab>& vocab_ptr() const noexcept { return vocab_; }
  const Bounds& bounds() const noexcept { return bounds_; }
  const std::vector<SceneObject>& objects() const noexcept { return objects_; }
  std::size_t size() const noexcept { return objects_.size(); }

  std::size_t floor_index() const noexcept { return floor_; }
  const SceneObject& floor() const noexcept { return objects_[floor_]; }
  std::optional<std::size_t> find(const std::string& id) const;
  bool is_removable(std::size_t index) const;
  std::vector<std::size_t> removable_indices() const;

  Scene without(std::size_t index) const;
  Scene with_object(SceneObject object) const;

  bool operator==(const Scene& other) const;

 private:
  std::string room_type_;
  std::shared_ptr<const CategoryVocab> vocab_;
  Bounds bounds_;
  std::vector<SceneObject> objects_;
  std::size_t floor_ = 0;
};

struct TrainingSample {
  Scene scene;  // the input scene with the target removed
  std::string removed_id;
  int target_category = 0;
  Vec3 target_size{};
  Vec3 query{};
};

/// Removes one non-structural object chosen uniformly at random.
TrainingSample make_training_sample(const Scene& scene, Rng& rng);
/// Removes the object at `index`; throws if it is the floor or a wall.
TrainingSample make_training_sample_at(const Scene& scene, std::size_t index);

// Scene files ("sgnet-scene/1").
Scene parse_scene(const std::string& text);
Scene load_scene(const std::string& path);
std::string scene_to_canonical_json(const Scene& scene);
void save_scene(const Scene& scene, const std::string& path);

/// Rounds to nine significant digits, i.e. the precision the canonical
/// serializer writes.
double round_sig9(double v);

/// Uniform integer in [0, n) from the raw engine output. Unlike
/// std::uniform_int_distribution the result does not depend on the standard
/// library in use.
std::size_t uniform_index(Rng& rng, std::size_t n);
/// Uniform real in [lo, hi) from 53 random bits.
double uniform_real(Rng& rng, double lo, double hi);

}  // namespace sgnet
