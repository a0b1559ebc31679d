// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
#include "sgnet/train.hpp"

namespace sgnet {

nlohmann::json ablation_to_json(const std::vector<AblationRow>& rows) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rows) {
    j.push_back({{"variant", std::string(variant_name(r.variant))},
                 {"top1", r.top1},
                 {"top3", r.top3},
                 {"top5", r.top5},
                 {"size_cm", r.size_cm}});
  }
  return j;
}

std::vector<AblationRow> run_ablation(const std::vector<Scene>& train, const std::vector<Scene>& val,
                                      const std::vector<Scene>& test, const std::vector<Variant>& variants,
                                      const ModelConfig& base, const TrainConfig& cfg, std::uint64_t eval_seed) {
  if (train.empty() || test.empty()) throw std::invalid_argument("ablation needs training and test scenes");
  const std::uint64_t hash = train.front().vocab().hash();
  const std::vector<Query> test_queries = make_queries(test, eval_seed);
  std::vector<AblationRow> rows;
  for (Variant v : variants) {
    ModelConfig mc = base;
    mc.variant = v;
    TrainResult tr = train_model(make_model(mc, hash, cfg.seed), train, val, cfg);
    const EvalReport rep = evaluate_queries(tr.model, test_queries, cfg.eval_threads);
    rows.push_back({v, rep.top(1), rep.top(3), rep.top(5), rep.size_cm});
  }
  return rows;
}

}  // namespace sgnet
