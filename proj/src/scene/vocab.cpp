// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
#include <cstdio>

#include "sgnet/scene.hpp"

namespace sgnet {

CategoryVocab::CategoryVocab(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.size() < 3) {
    throw SceneError("vocab.names", "at least three categories are required (floor, wall, one furniture)");
  }
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) {
      throw SceneError("vocab.names[" + std::to_string(i) + "]", "empty category name");
    }
    if (!lookup_.emplace(names_[i], static_cast<int>(i)).second) {
      throw SceneError("vocab.names[" + std::to_string(i) + "]", "duplicate category '" + names_[i] + "'");
    }
  }
  auto floor = lookup_.find(kFloor);
  auto wall = lookup_.find(kWall);
  if (floor == lookup_.end()) throw SceneError("vocab.names", "missing reserved category 'floor'");
  if (wall == lookup_.end()) throw SceneError("vocab.names", "missing reserved category 'wall'");
  floor_ = floor->second;
  wall_ = wall->second;

  std::uint64_t h = 1469598103934665603ULL;
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (i > 0) {
      h ^= static_cast<unsigned char>('\n');
      h *= 1099511628211ULL;
    }
    for (unsigned char c : names_[i]) {
      h ^= c;
      h *= 1099511628211ULL;
    }
  }
  hash_ = h;
}

const std::string& CategoryVocab::name(int index) const {
  if (index < 0 || index >= size()) throw std::out_of_range("category index out of range");
  return names_[static_cast<std::size_t>(index)];
}

int CategoryVocab::index(const std::string& name) const {
  auto it = lookup_.find(name);
  if (it == lookup_.end()) throw std::out_of_range("unknown category '" + name + "'");
  return it->second;
}

std::optional<int> CategoryVocab::find(const std::string& name) const {
  auto it = lookup_.find(name);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::string CategoryVocab::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_));
  return buf;
}

}  // namespace sgnet
