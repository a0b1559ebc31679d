// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
#include <algorithm>
#include <cmath>
#include <numeric>

#include "sgnet/train.hpp"

namespace sgnet {

namespace {

// Derived stream for the validation removals, independent of the training
// draws.
constexpr std::uint64_t kValidationSalt = 0x76616c2d71756572ULL;

void shuffle_indices(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
}

}  // namespace

Query make_query(const TrainingSample& sample, const std::string& scene_id) {
  Query q;
  q.graph = insert_query_node(build_graph(sample.scene), sample.query);
  q.target = sample.target_category;
  q.target_size = sample.target_size;
  q.scene_id = scene_id;
  q.room_type = sample.scene.room_type();
  q.object_count = sample.scene.removable_indices().size() + 1;
  return q;
}

std::vector<Query> make_queries(const std::vector<Scene>& scenes, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Query> out;
  out.reserve(scenes.size());
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    out.push_back(make_query(make_training_sample(scenes[i], rng), scenes[i].room_type() + "#" + std::to_string(i)));
  }
  return out;
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw std::invalid_argument("batch_size must be at least 1");
  if (micro_batch < 1) throw std::invalid_argument("micro_batch must be at least 1");
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be at least 1");
  if (!(size_weight >= 0) || !std::isfinite(size_weight)) throw std::invalid_argument("size weight must be >= 0");
  if (eval_every < 1) throw std::invalid_argument("eval_every must be at least 1");
  if (patience < 1) throw std::invalid_argument("patience must be at least 1");
  if (eval_threads < 1) throw std::invalid_argument("eval_threads must be at least 1");
  if (!(adam.lr > 0)) throw std::invalid_argument("learning rate must be positive");
}

StepStats training_step(Model& model, ad::AdamState& state, const std::vector<Query>& batch,
                        const TrainConfig& cfg) {
  if (batch.empty()) throw std::invalid_argument("empty training batch");
  model.params.zero_grad();
  const double inv = 1.0 / static_cast<double>(batch.size());
  StepStats stats;
  std::vector<SceneGraph> graphs;
  for (std::size_t start = 0; start < batch.size(); start += cfg.micro_batch) {
    const std::size_t end = std::min(batch.size(), start + cfg.micro_batch);
    graphs.clear();
    for (std::size_t i = start; i < end; ++i) graphs.push_back(batch[i].graph);

    ad::Tape tape;
    const ForwardVars fv = forward_batch(tape, model, graphs);
    ad::Var total;
    for (std::size_t i = start; i < end; ++i) {
      const std::vector<int> row{static_cast<int>(i - start)};
      const ad::Var ce = ad::cross_entropy(ad::gather_rows(fv.probs, row), batch[i].target);
      ad::Var term = ce;
      double se_value = 0;
      if (cfg.size_weight > 0) {
        const Vec3& t = batch[i].target_size;
        const ad::Var se = ad::squared_error(ad::gather_rows(fv.size, row), std::span<const double>(t.data(), 3));
        se_value = se.scalar();
        term = ad::add(ce, ad::scale(se, cfg.size_weight));
      }
      if (!std::isfinite(term.scalar())) {
        throw TrainingDiverged("non-finite loss for sample '" + batch[i].scene_id + "' (" +
                                   std::to_string(batch[i].graph.node_count()) + " nodes)",
                               batch[i].scene_id, batch[i].graph.node_count());
      }
      stats.cross_entropy += ce.scalar() * inv;
      stats.size_l2 += se_value * inv;
      total = total.valid() ? ad::add(total, term) : term;
    }
    tape.backward(total, inv);
  }
  stats.loss = stats.cross_entropy + cfg.size_weight * stats.size_l2;
  try {
    ad::adam_step(model.params.all(), state, cfg.adam);
  } catch (const ad::NonFiniteGradient& e) {
    throw TrainingDiverged(e.what(), batch.front().scene_id, batch.front().graph.node_count());
  }
  return stats;
}

TrainResult train_model(Model init, const std::vector<Scene>& train, const std::vector<Scene>& val,
                        const TrainConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  if (train.empty()) throw std::invalid_argument("empty training set");
  TrainResult result;
  Model model = std::move(init);
  ad::AdamState state;
  Rng rng(cfg.seed);
  const std::vector<Query> val_queries = make_queries(val, cfg.seed ^ kValidationSalt);

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  shuffle_indices(order, rng);
  std::size_t cursor = 0;

  std::optional<Model> best;
  int stale = 0;
  std::vector<Query> batch;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    batch.clear();
    while (batch.size() < cfg.batch_size) {
      if (cursor == order.size()) {
        shuffle_indices(order, rng);
        cursor = 0;
      }
      const std::size_t s = order[cursor++];
      batch.push_back(make_query(make_training_sample(train[s], rng), "train#" + std::to_string(s)));
    }
    const StepStats st = training_step(model, state, batch, cfg);
    TrainProgress p{it, st.loss, std::nullopt};
    result.iterations = it;

    if (!val_queries.empty() && (it % cfg.eval_every == 0 || it == cfg.max_iterations)) {
      const double top1 = evaluate_queries(model, val_queries, cfg.eval_threads).top(1);
      p.val_top1 = top1;
      if (!best || top1 > result.best_val_top1) {
        best = model;
        result.best_val_top1 = top1;
        result.best_iteration = it;
        stale = 0;
      } else if (++stale >= cfg.patience) {
        result.early_stopped = true;
      }
    }
    result.history.push_back(p);
    if (progress) progress(p);
    if (result.early_stopped) break;
  }
  if (best) {
    result.model = std::move(*best);
  } else {
    result.model = std::move(model);
    result.best_iteration = result.iterations;
  }
  return result;
}

}  // namespace sgnet
