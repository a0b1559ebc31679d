// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
#pragma once

#include <array>
#include <cstddef>

#include "sgnet/model.hpp"

namespace sgnet::detail {

// Parameter indices of one three-layer perceptron (two hidden ReLU layers).
struct Mlp {
  std::array<std::size_t, 3> weight{};
  std::array<std::size_t, 3> bias{};
};

// Recurrent aggregator parameters: GRU uses all four, the vanilla RNN uses
// (weight_ih, weight_hh, bias).
struct Recurrent {
  std::size_t w_ih = 0, w_hh = 0, b_ih = 0, b_hh = 0;
};

struct Layout {
  Mlp init;
  std::array<Mlp, kRelationCount> msg;
  std::array<Recurrent, kRelationCount> rec;
  Mlp att;
  Mlp upd;
  Mlp pred;
  Mlp size;
};

void build_params(ModelParams& params, const ModelConfig& cfg);
Layout resolve_layout(const ModelParams& params, const ModelConfig& cfg);

}  // namespace sgnet::detail
