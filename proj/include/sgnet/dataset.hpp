// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sgnet/scene.hpp"

namespace sgnet {

/// Indices into the scene list passed to split_dataset.
struct DatasetSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
  std::uint64_t seed = 0;
};

/// Seeded 80/10/10 partition (validation and test sizes rounded to nearest,
/// training takes the rest). Requires at least ten scenes.
DatasetSplit split_dataset(std::size_t scene_count, std::uint64_t seed);

template <typename T>
std::vector<T> select(const std::vector<T>& items, const std::vector<std::size_t>& indices) {
  std::vector<T> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(items.at(i));
  return out;
}

/// Loads every *.json file of a directory, sorted by file name.
std::vector<Scene> load_scene_dir(const std::string& dir);
/// Writes scenes as scene-000000.json, scene-000001.json, ...
void save_scene_dir(const std::vector<Scene>& scenes, const std::string& dir);

}  // namespace sgnet
