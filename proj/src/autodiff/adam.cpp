// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
#include <cmath>

#include "sgnet/optim.hpp"

namespace sgnet::ad {

void adam_step(std::span<Parameter> params, AdamState& state, const AdamConfig& cfg) {
  for (const Parameter& p : params) {
    if (p.grad.size() != p.value.size()) throw std::invalid_argument("gradient shape mismatch for '" + p.name + "'");
    if (!p.grad.all_finite()) throw NonFiniteGradient(p.name);
  }
  if (state.m.empty()) {
    for (const Parameter& p : params) {
      state.m.emplace_back(p.value.shape(), 0.0);
      state.v.emplace_back(p.value.shape(), 0.0);
    }
  }
  if (state.m.size() != params.size()) throw std::invalid_argument("optimizer state does not match parameter list");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (state.m[i].shape() != params[i].value.shape()) {
      throw std::invalid_argument("moment shape mismatch for '" + params[i].name + "'");
    }
  }

  state.t += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = params[i];
    const bool decay = p.decay && cfg.weight_decay != 0.0;
    double* theta = p.value.data();
    const double* g = p.grad.data();
    double* m = state.m[i].data();
    double* v = state.v[i].data();
    for (std::size_t j = 0; j < p.value.size(); ++j) {
      double gj = g[j];
      if (decay && cfg.decay_mode == WeightDecayMode::Coupled) gj += cfg.weight_decay * theta[j];
      m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * gj;
      v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * gj * gj;
      if (decay && cfg.decay_mode == WeightDecayMode::Decoupled) theta[j] -= cfg.lr * cfg.weight_decay * theta[j];
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      theta[j] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
  }
}

}  // namespace sgnet::ad
