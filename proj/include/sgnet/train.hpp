// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
//
// Remove-one-object training, top-K evaluation, ablations and posterior
// fusion.
#pragma once

#include <array>
#include <functional>
#include <json.hpp>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgnet/model.hpp"
#include "sgnet/optim.hpp"
#include "sgnet/scene.hpp"

namespace sgnet {

/// A prepared query: the scene graph with the target removed and the query
/// node inserted at the removed centroid.
struct Query {
  SceneGraph graph;
  int target = 0;
  Vec3 target_size{};
  std::string scene_id;  // room type plus index, for diagnostics
  std::string room_type;
  std::size_t object_count = 0;  // non-structural objects before removal
};

Query make_query(const TrainingSample& sample, const std::string& scene_id = {});
/// One seeded removal per scene.
std::vector<Query> make_queries(const std::vector<Scene>& scenes, std::uint64_t seed);

struct TrainConfig {
  std::size_t batch_size = 350;  // scenes per optimizer step
  std::size_t micro_batch = 4;   // graphs per forward pass; does not change the math
  int max_iterations = 10000;
  std::uint64_t seed = 1;
  double size_weight = 1.0;  // lambda_size; sizes in meters
  ad::AdamConfig adam;
  int eval_every = 100;  // iterations between validation evaluations
  int patience = 10;     // evaluations without improvement before stopping
  int eval_threads = 1;

  void validate() const;
};

class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(const std::string& what, std::string sample, std::size_t nodes)
      : std::runtime_error(what), sample_id(std::move(sample)), node_count(nodes) {}
  std::string sample_id;
  std::size_t node_count;
};

struct StepStats {
  double loss = 0;  // mean of CE + lambda * L2
  double cross_entropy = 0;
  double size_l2 = 0;
};

/// Mean loss over `batch`, one Adam step. Throws TrainingDiverged (before
/// touching parameters) when the loss or a gradient is not finite.
StepStats training_step(Model& model, ad::AdamState& state, const std::vector<Query>& batch,
                        const TrainConfig& cfg);

struct TrainProgress {
  int iteration = 0;
  double loss = 0;
  std::optional<double> val_top1;
};

struct TrainResult {
  Model model;  // parameters of the best validation evaluation
  int iterations = 0;
  int best_iteration = 0;
  double best_val_top1 = 0;
  std::vector<TrainProgress> history;
  bool early_stopped = false;
};

using ProgressFn = std::function<void(const TrainProgress&)>;

/// Trains from `init` on random removals drawn from `train`. Validation uses
/// one seeded removal per scene of `val`; with an empty `val` the last
/// parameters are returned.
TrainResult train_model(Model init, const std::vector<Scene>& train, const std::vector<Scene>& val,
                        const TrainConfig& cfg, const ProgressFn& progress = {});

struct CountBin {
  std::size_t objects = 0;
  std::size_t queries = 0;
  double top1 = 0;
};

struct RoomStats {
  std::size_t queries = 0;
  double top1 = 0;
  double top3 = 0;
  double top5 = 0;
  double size_cm = 0;
};

struct EvalReport {
  std::size_t queries = 0;
  std::array<double, 10> topk{};  // topk[K-1]
  double size_cm = 0;
  std::map<std::string, RoomStats> per_room;
  std::vector<CountBin> by_object_count;  // ascending object count

  double top(int k) const { return topk.at(static_cast<std::size_t>(k - 1)); }
  nlohmann::json to_json() const;
  std::string to_table() const;
};

/// Rank of `target` when categories are sorted by descending probability,
/// ties broken by ascending index (0 = top-1).
int target_rank(std::span<const double> probs, int target);

EvalReport evaluate_queries(const Model& model, const std::vector<Query>& queries, int threads = 1);
/// Seeded single removal per scene, then evaluate_queries.
EvalReport evaluate_topk(const Model& model, const std::vector<Scene>& scenes, std::uint64_t seed, int threads = 1);

/// Mean over queries of the mean absolute per-axis error, in centimeters.
double size_error_cm(std::span<const Vec3> predicted, std::span<const Vec3> truth);

struct AblationRow {
  Variant variant = Variant::Full;
  double top1 = 0;
  double top3 = 0;
  double top5 = 0;
  double size_cm = 0;
};

nlohmann::json ablation_to_json(const std::vector<AblationRow>& rows);

/// Trains and evaluates every variant with identical data, seeds and
/// configuration apart from the variant.
std::vector<AblationRow> run_ablation(const std::vector<Scene>& train, const std::vector<Scene>& val,
                                      const std::vector<Scene>& test, const std::vector<Variant>& variants,
                                      const ModelConfig& base, const TrainConfig& cfg, std::uint64_t eval_seed);

class ContradictoryPosteriors : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// out[c] = a[c] b[c] / sum_c' a[c'] b[c'].
std::vector<double> fuse_posteriors(std::span<const double> context, std::span<const double> external);

/// Object id -> distribution, from {"<object id>": [p_0, ..., p_{C-1}], ...}.
using ExternalPosteriors = std::map<std::string, std::vector<double>>;
ExternalPosteriors parse_posteriors(const nlohmann::json& j, std::size_t categories);
ExternalPosteriors load_posteriors(const std::string& path, std::size_t categories);

}  // namespace sgnet
