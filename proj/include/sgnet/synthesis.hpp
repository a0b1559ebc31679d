// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
//
// Placement grids, greedy iterative synthesis and attention-based edge
// pruning.
#pragma once

#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgnet/model.hpp"
#include "sgnet/scene.hpp"

namespace sgnet {

inline constexpr const char* kFloorSurface = "floor";
inline constexpr double kCellLift = 0.01;  // query height above the surface
inline constexpr double kMinPlacedExtent = 0.01;

class UnknownSurface : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EmptyFootprint : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NoAdmissibleCell : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Horizontal rectangle at height `top`, clipped to the scene bounds.
struct Surface {
  std::string name;  // "floor" or an object id
  std::array<double, 2> x{};
  std::array<double, 2> y{};
  double top = 0;
};

/// "floor" maps to the scene bounds at the floor's top face; anything else
/// names an object whose top face is used.
Surface find_surface(const Scene& scene, const std::string& name);

/// Cells per meter: spacing 0.25 m on the floor, 0.10 m on objects.
double default_resolution(const std::string& surface);

struct GridCell {
  Vec3 p{};
  PredictionResult result;
};

struct PlacementGrid {
  std::string surface;
  double resolution = 0;  // cells per meter
  int columns = 0;        // along x
  int rows = 0;           // along y
  std::vector<GridCell> cells;  // row-major: index = row * columns + column

  nlohmann::json to_json() const;
};

/// floor(extent * resolution) cells per axis, centered on the surface. Each
/// cell is evaluated on its own graph, so the result does not depend on the
/// evaluation order or the thread count.
PlacementGrid eval_grid(const Scene& scene, const Model& model, const std::string& surface, double resolution,
                        int threads = 1);

struct GridSpec {
  std::string surface = kFloorSurface;
  std::optional<double> resolution;  // default_resolution(surface) when unset
  std::optional<double> stop_threshold;  // 2 / C when unset
  int threads = 1;
};

struct SynthesisStep {
  int category = -1;
  std::string object_id;  // empty when stopped
  Vec3 position{};        // the chosen cell point
  Vec3 size{};
  double score = 0;  // best cell probability over the whole grid
  bool stop = false;
  std::size_t skipped_cells = 0;  // better cells rejected for collisions

  nlohmann::json to_json(const CategoryVocab& vocab) const;
};

struct SynthesisOutcome {
  SynthesisStep step;
  Scene scene;  // unchanged when step.stop
};

/// Axis-aligned boxes whose interiors intersect.
bool boxes_intersect(const SceneObject& a, const SceneObject& b, double tol = 1e-9);

/// Greedy step: the best non-structural (cell, category) pair by
/// probability. A cell whose box would intersect any object other than the
/// supporting surface is passed over in favour of the next-best cell.
/// Throws NoAdmissibleCell when every cell collides.
SynthesisOutcome synth_step(const Scene& scene, const Model& model, const GridSpec& spec = {});

enum class SynthesisEnd { Stopped, MaxSteps, NoAdmissibleCell };

struct SynthesisRun {
  Scene scene;
  std::vector<SynthesisStep> steps;  // placements only
  SynthesisEnd end = SynthesisEnd::Stopped;
};

/// Repeats synth_step until the stop flag, `max_steps` placements or no
/// admissible cell. Writes one JSON line per step to `log` when given.
SynthesisRun synthesize(const Scene& scene, const Model& model, const GridSpec& spec, int max_steps,
                        std::ostream* log = nullptr);

struct PruneReport {
  SceneGraph graph;  // edges with attention >= epsilon
  std::size_t removed = 0;
  PredictionResult unpruned;
  PredictionResult pruned;
  double tv_distance = 0;  // 0.5 * sum |p - q|
};

/// Requires a model with learned attention and epsilon in [0, 1).
PruneReport prune_edges(const SceneGraph& graph, const Model& model, double epsilon);

}  // namespace sgnet
