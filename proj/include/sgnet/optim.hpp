// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgnet/autodiff.hpp"

namespace sgnet::ad {

enum class WeightDecayMode {
  Decoupled,  // theta -= lr * lambda * theta, outside the moment estimates
  Coupled,    // lambda * theta is added to the gradient before the moments
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-5;
  WeightDecayMode decay_mode = WeightDecayMode::Decoupled;
};

struct AdamState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  long long t = 0;
};

class NonFiniteGradient : public std::runtime_error {
 public:
  explicit NonFiniteGradient(const std::string& parameter)
      : std::runtime_error("non-finite gradient in parameter '" + parameter + "'"), parameter_(parameter) {}
  const std::string& parameter() const noexcept { return parameter_; }

 private:
  std::string parameter_;
};

/// One bias-corrected Adam update from each parameter's `grad`. Parameters
/// with `decay == false` get no weight decay. Throws NonFiniteGradient (and
/// leaves parameters and state untouched) when any gradient is NaN or inf.
void adam_step(std::span<Parameter> params, AdamState& state, const AdamConfig& config = {});

}  // namespace sgnet::ad
