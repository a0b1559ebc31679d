// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
//
// Message-passing network over scene graphs: node initialization, typed
// messages, attention, ordered recurrent aggregation, node update, and the
// category and size heads of the query node.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sgnet/autodiff.hpp"
#include "sgnet/relations.hpp"

namespace sgnet {

enum class Variant : std::uint32_t {
  Full = 0,
  Tree = 1,           // support edges plus cycle-free surrounding edges
  Sparse = 2,         // every relation except co-occurrence
  CoOccurOnly = 3,
  AggSum = 4,
  AggMax = 5,
  AggVanillaRnn = 6,
  NoAttention = 7,
  DistWeights = 8,
};
inline constexpr std::array<Variant, 9> kAllVariants{
    Variant::Full,   Variant::Tree,          Variant::Sparse,      Variant::CoOccurOnly, Variant::AggSum,
    Variant::AggMax, Variant::AggVanillaRnn, Variant::NoAttention, Variant::DistWeights};

std::string_view variant_name(Variant v);
Variant variant_from_name(std::string_view name);

enum class Aggregator { Gru, Sum, Max, VanillaRnn };

struct ModelConfig {
  int categories = 0;  // C
  int node_dim = 100;
  int hidden = 300;
  int iterations = 3;  // T
  Variant variant = Variant::Full;
  double dist_c = 1.0;  // DistWeights: a = c * exp(-distance / b)
  double dist_b = 1.0;

  int feature_dim() const noexcept { return categories + 6; }
  Aggregator aggregator() const noexcept;
  bool learned_attention() const noexcept;
  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

/// Flat, named parameter store. Names look like "msg.next_to.1.weight".
class ModelParams {
 public:
  ModelParams() = default;
  ad::Parameter& add(std::string name, std::vector<std::size_t> shape, bool weight_decay);

  std::vector<ad::Parameter>& all() noexcept { return params_; }
  const std::vector<ad::Parameter>& all() const noexcept { return params_; }
  std::size_t index(const std::string& name) const;
  bool contains(const std::string& name) const { return lookup_.count(name) != 0; }
  ad::Parameter& get(const std::string& name) { return params_[index(name)]; }
  const ad::Parameter& get(const std::string& name) const { return params_[index(name)]; }
  std::size_t scalar_count() const;
  void zero_grad();
  /// FNV-1a over every parameter name and value bit pattern.
  std::uint64_t checksum() const;

 private:
  std::vector<ad::Parameter> params_;
  std::unordered_map<std::string, std::size_t> lookup_;
};

struct Model {
  ModelConfig config;
  ModelParams params;
  std::uint64_t vocab_hash = 0;
};

/// Creates every tensor the configuration needs, initialized uniformly in
/// [-1/sqrt(fan_in), 1/sqrt(fan_in)] from `seed`.
Model make_model(const ModelConfig& config, std::uint64_t vocab_hash, std::uint64_t seed);

struct PredictionResult {
  std::vector<double> probs;  // length C
  Vec3 size{};                // meters
};

struct MessagePacket {
  int iteration = 0;
  int from = 0;
  int to = 0;
  RelationType relation = RelationType::CoOccurring;
  std::vector<double> payload;  // unscaled message
  double weight = 1.0;
};

struct ForwardTrace {
  std::vector<MessagePacket> packets;
  std::vector<ad::Matrix> latents;  // h^(0) .. h^(T), one row per node
};

/// Edge set the variant actually passes messages over.
SceneGraph variant_graph(const SceneGraph& graph, Variant variant);

/// x_i = [one-hot category, position, size]; the query row is [0, p, 0].
ad::Matrix raw_features(const SceneGraph& graph);

struct ForwardVars {
  ad::Var probs;   // B x C, one row per graph
  ad::Var size;    // B x 3
  ad::Var latent;  // B x node_dim, query rows of h^(T)
};

/// Records the forward pass on `tape`. Gradients reach `model.params` when
/// the tape records.
ForwardVars forward(ad::Tape& tape, Model& model, const SceneGraph& graph, ForwardTrace* trace = nullptr);

/// Several graphs evaluated as one disjoint union; row b of every output
/// belongs to graphs[b]. Same values as separate forward calls up to
/// floating-point summation order.
ForwardVars forward_batch(ad::Tape& tape, Model& model, std::span<const SceneGraph> graphs);

/// Inference only; never touches gradients.
PredictionResult predict(const Model& model, const SceneGraph& graph, ForwardTrace* trace = nullptr);

std::vector<PredictionResult> predict_batch(const Model& model, std::span<const SceneGraph> graphs);

/// Builds the scene graph, inserts the query at `p` and predicts.
PredictionResult predict_at(const Model& model, const Scene& scene, const Vec3& p);

/// Attention weight of every edge of `graph` (in graph.edges() order) under
/// the model's attention rule.
std::vector<double> edge_attention(const Model& model, const SceneGraph& graph);

// Single-vector forms of the network stages. They share the batched code
// path and exist for inspection and testing.
std::vector<double> init_node(const Model& model, std::span<const double> features);
std::vector<double> compute_message(const Model& model, RelationType r, std::span<const double> h_from,
                                    std::span<const double> h_to);
double attention_weight(const Model& model, std::span<const double> x_from, std::span<const double> x_to);
/// Folds messages ordered furthest emitter first. Empty input gives zeros.
std::vector<double> aggregate(const Model& model, RelationType r, const std::vector<std::vector<double>>& messages,
                              std::span<const double> weights);
std::vector<double> update_node(const Model& model, std::span<const double> h,
                                const std::array<std::vector<double>, kRelationCount>& aggregated);
PredictionResult decode_query(const Model& model, std::span<const double> h);

// Checkpoints -------------------------------------------------------------

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void save_checkpoint(const Model& model, const std::string& path);
std::vector<std::uint8_t> checkpoint_bytes(const Model& model);
/// When `expected_vocab_hash` is set, a mismatch throws CheckpointError.
Model load_checkpoint(const std::string& path, std::optional<std::uint64_t> expected_vocab_hash = std::nullopt);
Model checkpoint_from_bytes(std::span<const std::uint8_t> bytes,
                            std::optional<std::uint64_t> expected_vocab_hash = std::nullopt);

}  // namespace sgnet
