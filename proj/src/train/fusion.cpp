// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
#include <cmath>
#include <fstream>

#include "sgnet/train.hpp"

namespace sgnet {

namespace {

void require_distribution(std::span<const double> p, const std::string& what) {
  if (p.empty()) throw std::invalid_argument(what + " is empty");
  double total = 0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0) throw std::invalid_argument(what + " has a negative or non-finite entry");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-6) throw std::invalid_argument(what + " does not sum to 1");
}

}  // namespace

std::vector<double> fuse_posteriors(std::span<const double> context, std::span<const double> external) {
  if (context.size() != external.size()) throw std::invalid_argument("posteriors differ in length");
  require_distribution(context, "context posterior");
  require_distribution(external, "external posterior");
  std::vector<double> out(context.size());
  double z = 0;
  for (std::size_t c = 0; c < out.size(); ++c) z += out[c] = context[c] * external[c];
  if (z == 0) throw ContradictoryPosteriors("posteriors have disjoint support");
  for (double& v : out) v /= z;
  return out;
}

ExternalPosteriors parse_posteriors(const nlohmann::json& j, std::size_t categories) {
  if (!j.is_object()) throw std::invalid_argument("posterior file must be a JSON object keyed by object id");
  ExternalPosteriors out;
  for (const auto& [id, v] : j.items()) {
    if (!v.is_array() || v.size() != categories) {
      throw std::invalid_argument("posterior '" + id + "' must be an array of " + std::to_string(categories) +
                                  " numbers");
    }
    std::vector<double> p;
    for (const auto& x : v) {
      if (!x.is_number()) throw std::invalid_argument("posterior '" + id + "' has a non-numeric entry");
      p.push_back(x.get<double>());
    }
    require_distribution(p, "posterior '" + id + "'");
    out.emplace(id, std::move(p));
  }
  return out;
}

ExternalPosteriors load_posteriors(const std::string& path, std::size_t categories) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("'" + path + "': " + e.what());
  }
  return parse_posteriors(j, categories);
}

}  // namespace sgnet
