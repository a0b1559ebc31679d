// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "model/layout.hpp"
#include "sgnet/model.hpp"

namespace sgnet {

ad::Parameter& ModelParams::add(std::string name, std::vector<std::size_t> shape, bool weight_decay) {
  if (lookup_.count(name)) throw std::invalid_argument("duplicate parameter '" + name + "'");
  lookup_.emplace(name, params_.size());
  params_.emplace_back(std::move(name), ad::Tensor(std::move(shape), 0.0), weight_decay);
  return params_.back();
}

std::size_t ModelParams::index(const std::string& name) const {
  auto it = lookup_.find(name);
  if (it == lookup_.end()) throw std::out_of_range("no parameter named '" + name + "'");
  return it->second;
}

std::size_t ModelParams::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

void ModelParams::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

std::uint64_t ModelParams::checksum() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& p : params_) {
    mix(p.name.data(), p.name.size());
    mix(p.value.data(), p.value.size() * sizeof(double));
  }
  return h;
}

namespace detail {

namespace {

Mlp add_mlp(ModelParams& params, const std::string& prefix, int in, int hidden, int out) {
  Mlp m;
  const int dims[4] = {in, hidden, hidden, out};
  for (int l = 0; l < 3; ++l) {
    const std::string base = prefix + "." + std::to_string(l);
    params.add(base + ".weight", {static_cast<std::size_t>(dims[l + 1]), static_cast<std::size_t>(dims[l])}, true);
    params.add(base + ".bias", {static_cast<std::size_t>(dims[l + 1])}, false);
    m.weight[static_cast<std::size_t>(l)] = params.index(base + ".weight");
    m.bias[static_cast<std::size_t>(l)] = params.index(base + ".bias");
  }
  return m;
}

Mlp find_mlp(const ModelParams& params, const std::string& prefix) {
  Mlp m;
  for (int l = 0; l < 3; ++l) {
    const std::string base = prefix + "." + std::to_string(l);
    m.weight[static_cast<std::size_t>(l)] = params.index(base + ".weight");
    m.bias[static_cast<std::size_t>(l)] = params.index(base + ".bias");
  }
  return m;
}

}  // namespace

void build_params(ModelParams& params, const ModelConfig& cfg) {
  const int k = cfg.node_dim;
  const int hid = cfg.hidden;
  const auto uk = static_cast<std::size_t>(k);
  add_mlp(params, "init", cfg.feature_dim(), hid, k);
  for (RelationType r : kAllRelations) {
    add_mlp(params, "msg." + std::string(relation_name(r)), 2 * k, hid, k);
  }
  if (cfg.learned_attention()) add_mlp(params, "att", 2 * cfg.feature_dim(), hid, 1);
  for (RelationType r : kAllRelations) {
    const std::string name(relation_name(r));
    if (cfg.aggregator() == Aggregator::Gru) {
      params.add("gru." + name + ".weight_ih", {3 * uk, uk}, true);
      params.add("gru." + name + ".weight_hh", {3 * uk, uk}, true);
      params.add("gru." + name + ".bias_ih", {3 * uk}, false);
      params.add("gru." + name + ".bias_hh", {3 * uk}, false);
    } else if (cfg.aggregator() == Aggregator::VanillaRnn) {
      params.add("rnn." + name + ".weight_ih", {uk, uk}, true);
      params.add("rnn." + name + ".weight_hh", {uk, uk}, true);
      params.add("rnn." + name + ".bias", {uk}, false);
    }
  }
  add_mlp(params, "upd", (1 + kRelationCount) * k, hid, k);
  add_mlp(params, "pred", k, hid, cfg.categories);
  add_mlp(params, "size", k, hid, 3);
}

Layout resolve_layout(const ModelParams& params, const ModelConfig& cfg) {
  Layout l;
  l.init = find_mlp(params, "init");
  for (RelationType r : kAllRelations) {
    const auto s = static_cast<std::size_t>(slot(r));
    const std::string name(relation_name(r));
    l.msg[s] = find_mlp(params, "msg." + name);
    if (cfg.aggregator() == Aggregator::Gru) {
      l.rec[s] = {params.index("gru." + name + ".weight_ih"), params.index("gru." + name + ".weight_hh"),
                  params.index("gru." + name + ".bias_ih"), params.index("gru." + name + ".bias_hh")};
    } else if (cfg.aggregator() == Aggregator::VanillaRnn) {
      l.rec[s] = {params.index("rnn." + name + ".weight_ih"), params.index("rnn." + name + ".weight_hh"),
                  params.index("rnn." + name + ".bias"), 0};
    }
  }
  if (cfg.learned_attention()) l.att = find_mlp(params, "att");
  l.upd = find_mlp(params, "upd");
  l.pred = find_mlp(params, "pred");
  l.size = find_mlp(params, "size");
  return l;
}

}  // namespace detail

Model make_model(const ModelConfig& config, std::uint64_t vocab_hash, std::uint64_t seed) {
  config.validate();
  Model m;
  m.config = config;
  m.vocab_hash = vocab_hash;
  detail::build_params(m.params, config);

  Rng rng(seed);
  for (auto& p : m.params.all()) {
    // Recurrent cells follow the usual 1/sqrt(state width) bound.
    double fan_in;
    if (p.name.rfind("gru.", 0) == 0 || p.name.rfind("rnn.", 0) == 0) {
      fan_in = config.node_dim;
    } else if (p.value.rank() == 2) {
      fan_in = static_cast<double>(p.value.cols());
    } else {
      const std::string weight = p.name.substr(0, p.name.size() - 4) + "weight";
      fan_in = static_cast<double>(m.params.get(weight).value.cols());
    }
    const double bound = 1.0 / std::sqrt(fan_in);
    for (double& v : p.value.values()) v = uniform_real(rng, -bound, bound);
  }
  return m;
}

}  // namespace sgnet
