// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
#include "sgnet/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <stdexcept>

namespace sgnet {

DatasetSplit split_dataset(std::size_t scene_count, std::uint64_t seed) {
  if (scene_count < 10) throw std::invalid_argument("split_dataset needs at least 10 scenes");
  std::vector<std::size_t> order(scene_count);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  // Fisher-Yates with the library-independent index draw.
  for (std::size_t i = scene_count - 1; i > 0; --i) {
    std::swap(order[i], order[uniform_index(rng, i + 1)]);
  }
  const auto n_val = static_cast<std::size_t>(std::llround(0.1 * static_cast<double>(scene_count)));
  const std::size_t n_test = n_val;
  const std::size_t n_train = scene_count - n_val - n_test;

  DatasetSplit split;
  split.seed = seed;
  split.train.assign(order.begin(), order.begin() + n_train);
  split.val.assign(order.begin() + n_train, order.begin() + n_train + n_val);
  split.test.assign(order.begin() + n_train + n_val, order.end());
  return split;
}

std::vector<Scene> load_scene_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Scene> scenes;
  scenes.reserve(files.size());
  for (const auto& f : files) scenes.push_back(load_scene(f.string()));
  return scenes;
}

void save_scene_dir(const std::vector<Scene>& scenes, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "scene-%06zu.json", i);
    save_scene(scenes[i], (fs::path(dir) / name).string());
  }
}

}  // namespace sgnet
