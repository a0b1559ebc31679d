// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
#include <algorithm>
#include <numeric>
#include <ostream>

#include "sgnet/scene_json.hpp"
#include "sgnet/synthesis.hpp"

namespace sgnet {

namespace {

struct CellBest {
  std::size_t cell = 0;
  int category = -1;
  double prob = -1;
};

CellBest best_in_cell(const GridCell& cell, std::size_t index, const CategoryVocab& vocab) {
  CellBest b{index, -1, -1};
  for (std::size_t c = 0; c < cell.result.probs.size(); ++c) {
    const int ci = static_cast<int>(c);
    if (vocab.is_structural(ci)) continue;
    if (cell.result.probs[c] > b.prob) {
      b.prob = cell.result.probs[c];
      b.category = ci;
    }
  }
  return b;
}

std::string fresh_id(const Scene& scene, const std::string& stem) {
  for (int k = 1;; ++k) {
    std::string id = stem + "-" + std::to_string(k);
    if (!scene.find(id)) return id;
  }
}

}  // namespace

bool boxes_intersect(const SceneObject& a, const SceneObject& b, double tol) {
  for (int axis = 0; axis < 3; ++axis) {
    if (std::min(a.max(axis), b.max(axis)) - std::max(a.min(axis), b.min(axis)) <= tol) return false;
  }
  return true;
}

nlohmann::json SynthesisStep::to_json(const CategoryVocab& vocab) const {
  nlohmann::json j;
  j["stop"] = stop;
  j["score"] = score;
  j["category"] = category >= 0 ? nlohmann::json(vocab.name(category)) : nlohmann::json(nullptr);
  j["position"] = position;
  j["size"] = size;
  j["object_id"] = object_id;
  j["skipped_cells"] = skipped_cells;
  return j;
}

SynthesisOutcome synth_step(const Scene& scene, const Model& model, const GridSpec& spec) {
  const CategoryVocab& vocab = scene.vocab();
  const double threshold = spec.stop_threshold.value_or(2.0 / vocab.size());
  const double res = spec.resolution.value_or(default_resolution(spec.surface));
  const PlacementGrid grid = eval_grid(scene, model, spec.surface, res, spec.threads);
  const Surface surface = find_surface(scene, spec.surface);
  const auto support = scene.find(spec.surface);

  std::vector<CellBest> ranked;
  ranked.reserve(grid.cells.size());
  for (std::size_t i = 0; i < grid.cells.size(); ++i) ranked.push_back(best_in_cell(grid.cells[i], i, vocab));
  // Descending probability; ties go to the lower cell index.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const CellBest& a, const CellBest& b) { return a.prob > b.prob; });

  SynthesisOutcome out{{}, scene};
  SynthesisStep& step = out.step;
  const CellBest& top = ranked.front();
  step.score = std::max(0.0, top.prob);
  if (top.category < 0 || top.prob < threshold) {
    step.stop = true;
    step.category = top.category;
    step.position = grid.cells[top.cell].p;
    step.size = grid.cells[top.cell].result.size;
    return out;
  }

  for (const CellBest& cand : ranked) {
    const GridCell& cell = grid.cells[cand.cell];
    SceneObject obj;
    obj.category = cand.category;
    for (std::size_t a = 0; a < 3; ++a) obj.size[a] = std::max(kMinPlacedExtent, cell.result.size[a]);
    obj.position = {cell.p[0], cell.p[1], surface.top + 0.5 * obj.size[2]};
    bool collides = false;
    for (std::size_t k = 0; k < scene.size() && !collides; ++k) {
      if (support && k == *support) continue;
      if (!support && k == scene.floor_index()) continue;
      collides = boxes_intersect(obj, scene.objects()[k]);
    }
    if (collides) {
      ++step.skipped_cells;
      continue;
    }
    obj.id = fresh_id(scene, vocab.name(cand.category));
    step.category = cand.category;
    step.object_id = obj.id;
    step.position = cell.p;
    step.size = obj.size;
    out.scene = scene.with_object(std::move(obj));
    return out;
  }
  throw NoAdmissibleCell("every cell of surface '" + spec.surface + "' collides with an existing object");
}

SynthesisRun synthesize(const Scene& scene, const Model& model, const GridSpec& spec, int max_steps,
                        std::ostream* log) {
  if (max_steps < 0) throw std::invalid_argument("max_steps must be >= 0");
  SynthesisRun run{scene, {}, SynthesisEnd::MaxSteps};
  for (int k = 0; k < max_steps; ++k) {
    nlohmann::json line;
    line["step"] = k;
    try {
      SynthesisOutcome o = synth_step(run.scene, model, spec);
      line.update(o.step.to_json(scene.vocab()));
      if (log) *log << canonical_dump(line) << '\n';
      if (o.step.stop) {
        run.end = SynthesisEnd::Stopped;
        return run;
      }
      run.steps.push_back(std::move(o.step));
      run.scene = std::move(o.scene);
    } catch (const NoAdmissibleCell& e) {
      line["stop"] = true;
      line["error"] = e.what();
      if (log) *log << canonical_dump(line) << '\n';
      run.end = SynthesisEnd::NoAdmissibleCell;
      return run;
    }
  }
  return run;
}

}  // namespace sgnet
