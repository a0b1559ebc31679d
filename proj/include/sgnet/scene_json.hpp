// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
#pragma once

#include <json.hpp>
#include <string>

#include "sgnet/scene.hpp"

namespace sgnet {

inline constexpr const char* kSceneFormat = "sgnet-scene/1";

/// Builds a Scene from a parsed "sgnet-scene/1" document. Schema problems are
/// reported as SceneError with the JSON path of the offending field.
Scene scene_from_json(const nlohmann::json& doc);
nlohmann::json scene_to_json(const Scene& scene);

/// Serializes with sorted keys, no whitespace and floating point numbers
/// written with nine significant digits.
std::string canonical_dump(const nlohmann::json& doc);

}  // namespace sgnet
