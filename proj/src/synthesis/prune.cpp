// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
#include <cmath>

#include "sgnet/synthesis.hpp"

namespace sgnet {

PruneReport prune_edges(const SceneGraph& graph, const Model& model, double epsilon) {
  if (!model.config.learned_attention()) throw std::invalid_argument("pruning needs a model with learned attention");
  if (!(epsilon >= 0 && epsilon < 1)) throw std::invalid_argument("epsilon must lie in [0, 1)");

  const std::vector<double> att = edge_attention(model, graph);
  std::vector<bool> keep(att.size());
  std::size_t removed = 0;
  for (std::size_t i = 0; i < att.size(); ++i) {
    keep[i] = att[i] >= epsilon;
    removed += !keep[i];
  }
  // edges() is sorted, so a running index follows the attention order.
  std::size_t cursor = 0;
  SceneGraph pruned = graph.filtered([&](const Edge&) { return keep[cursor++]; });

  PruneReport r{std::move(pruned), removed, predict(model, graph), {}, 0};
  r.pruned = predict(model, r.graph);
  double tv = 0;
  for (std::size_t c = 0; c < r.unpruned.probs.size(); ++c) tv += std::abs(r.unpruned.probs[c] - r.pruned.probs[c]);
  r.tv_distance = 0.5 * tv;
  return r;
}

}  // namespace sgnet
