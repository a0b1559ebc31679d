// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
//
// Procedural room generator. Stands in for a furnished-room dataset: a room
// is a rectangular floor with four walls, furnished by a list of placement
// rules that are applied in order.
#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "sgnet/scene.hpp"

namespace sgnet {

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Wall identifiers. Along-wall extents map to world x for South/North and to
/// world y for West/East.
enum class WallSide { South = 0, North = 1, West = 2, East = 3 };

namespace rules {

/// A bed with its head against a random wall. Mandatory when listed.
struct BedAgainstWall {};

/// One nightstand on each side of the bed, against the same wall.
struct NightstandsFlankBed {
  double probability = 1.0;
  double min_gap = 0.02;
  double max_gap = 0.08;
};

/// A lamp standing on top of each nightstand (independently per nightstand).
struct LampOnNightstand {
  double probability = 1.0;
  double jitter = 0.03;
};

/// A desk against a wall with a chair in front of it.
struct DeskWithChair {
  double probability = 0.5;
  double min_gap = 0.05;
  double max_gap = 0.15;
};

/// A single object of `category` standing against a random wall.
struct AgainstWall {
  std::string category;
  double probability = 0.5;
};

/// A wall-mounted tv; when present a sofa stands against the opposite wall
/// facing it.
struct TvFacingSofa {
  double probability = 0.5;
  double mount_height = 1.0;
  double jitter = 0.2;
};

/// Long-range probe. One floor object is placed away from the walls; its
/// category is `with_tv` when a tv floats somewhere else in the room and
/// `without_tv` otherwise. The tv is kept more than `isolation` meters
/// (horizontally) away from every floor-parented box and off the room's
/// symmetry lines, so no support, surround or next-to chain reaches it.
struct IsolatedTvSelectsTarget {
  double tv_probability = 0.5;
  std::string with_tv = "sofa";
  std::string without_tv = "desk";
  double isolation = 0.6;
  double tv_bottom = 1.5;
};

}  // namespace rules

using PlacementRule = std::variant<rules::BedAgainstWall, rules::NightstandsFlankBed,
                                   rules::LampOnNightstand, rules::DeskWithChair,
                                   rules::AgainstWall, rules::TvFacingSofa,
                                   rules::IsolatedTvSelectsTarget>;

struct GeneratorRules {
  std::string room_type = "bedroom";
  std::vector<std::string> categories;  // vocabulary, in index order
  /// Canonical extents per category: (along the wall, depth from the wall, height).
  std::map<std::string, Vec3> extents;
  double size_noise = 0.02;  // uniform +/- on every extent
  std::array<double, 2> room_width{4.0, 5.5};
  std::array<double, 2> room_depth{4.0, 5.5};
  double wall_height = 2.6;
  double wall_thickness = 0.1;
  double floor_thickness = 0.1;
  int max_attempts = 200;
  std::vector<PlacementRule> placement;
};

/// Ten-category bedroom (floor, wall, bed, nightstand, lamp, wardrobe, desk,
/// chair, tv, sofa). Bed and nightstand share a height, as do chair and sofa,
/// so the category at a query is only recoverable from its context.
GeneratorRules bedroom_rules();

/// Five-category long-range probe (floor, wall, tv, sofa, desk).
GeneratorRules long_range_rules();

/// Size probe: every scene holds a bed, two nightstands with lamps, a desk
/// with its chair and a wardrobe (eight removable objects). Footprints are
/// square, so an object's world-frame extents do not depend on the wall it
/// stands against.
GeneratorRules size_probe_rules();

/// Composition is drawn first; placement is then retried up to
/// `rules.max_attempts` times. Throws GenerationError when no attempt fits.
Scene generate_scene(const GeneratorRules& rules, Rng& rng);

std::vector<Scene> generate_scenes(const GeneratorRules& rules, std::size_t count, std::uint64_t seed);

}  // namespace sgnet
