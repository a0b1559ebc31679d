// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
#include <stdexcept>
#include <string>

#include "sgnet/model.hpp"

namespace sgnet {

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::Full: return "full";
    case Variant::Tree: return "tree";
    case Variant::Sparse: return "sparse";
    case Variant::CoOccurOnly: return "co_occur_only";
    case Variant::AggSum: return "agg_sum";
    case Variant::AggMax: return "agg_max";
    case Variant::AggVanillaRnn: return "agg_vanilla_rnn";
    case Variant::NoAttention: return "no_attention";
    case Variant::DistWeights: return "dist_weights";
  }
  throw std::invalid_argument("unknown variant tag " + std::to_string(static_cast<std::uint32_t>(v)));
}

Variant variant_from_name(std::string_view name) {
  for (Variant v : kAllVariants) {
    if (variant_name(v) == name) return v;
  }
  throw std::invalid_argument("unknown variant '" + std::string(name) + "'");
}

Aggregator ModelConfig::aggregator() const noexcept {
  switch (variant) {
    case Variant::AggSum: return Aggregator::Sum;
    case Variant::AggMax: return Aggregator::Max;
    case Variant::AggVanillaRnn: return Aggregator::VanillaRnn;
    default: return Aggregator::Gru;
  }
}

bool ModelConfig::learned_attention() const noexcept {
  return variant != Variant::NoAttention && variant != Variant::DistWeights;
}

void ModelConfig::validate() const {
  if (categories < 3) throw std::invalid_argument("model needs at least 3 categories");
  if (node_dim <= 0 || hidden <= 0 || iterations <= 0) {
    throw std::invalid_argument("node_dim, hidden and iterations must be positive");
  }
  variant_name(variant);
  if (variant == Variant::DistWeights && !(dist_b > 0.0 && dist_c > 0.0)) {
    throw std::invalid_argument("dist_weights needs positive c and b");
  }
}

}  // namespace sgnet
