// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "model/layout.hpp"
#include "sgnet/model.hpp"

namespace sgnet {

using ad::Index;
using ad::Matrix;
using ad::Tape;
using ad::Var;

namespace {

// Parameter leaves, created once per tape and shared by every use.
class Binder {
 public:
  Binder(Tape& tape, const ModelParams& params, ModelParams* mutable_params)
      : tape_(tape), params_(params), mutable_(mutable_params), ids_(params.all().size(), -1) {}

  Var operator()(std::size_t index) {
    if (ids_[index] >= 0) return Var(&tape_, ids_[index]);
    Var v = (tape_.recording() && mutable_ != nullptr) ? tape_.param(mutable_->all()[index])
                                                        : tape_.param(params_.all()[index]);
    ids_[index] = v.id();
    return v;
  }

  Tape& tape() { return tape_; }

 private:
  Tape& tape_;
  const ModelParams& params_;
  ModelParams* mutable_;
  std::vector<int> ids_;
};

Var mlp_tail(Binder& p, const detail::Mlp& m, Var first) {
  Var h = ad::relu(first);
  h = ad::relu(ad::affine(h, p(m.weight[1]), p(m.bias[1])));
  return ad::affine(h, p(m.weight[2]), p(m.bias[2]));
}

Var mlp(Binder& p, const detail::Mlp& m, Var x) {
  return mlp_tail(p, m, ad::affine(x, p(m.weight[0]), p(m.bias[0])));
}

// The MLP applied to [h[src[e]], h[dst[e]]] for every e.
Var pair_mlp(Binder& p, const detail::Mlp& m, Var h, std::span<const int> src, std::span<const int> dst) {
  return mlp_tail(p, m, ad::pair_affine(h, p(m.weight[0]), p(m.bias[0]), src, dst));
}

struct RelationPlan {
  std::vector<int> src, dst, pair;  // edges grouped by target, furthest emitter first
  std::vector<int> targets;         // nodes with at least one emitter, ascending
  std::vector<std::vector<int>> segments;    // per node: its edge rows
  std::vector<std::vector<int>> step_rows;   // per fold step: positions in `targets`
  std::vector<std::vector<int>> step_edges;  // per fold step: edge rows
};

struct Plan {
  int n = 0;
  std::vector<int> queries;  // one per graph
  Matrix features;
  std::vector<int> pair_src, pair_dst;  // unique (emitter, receiver) pairs
  std::vector<double> pair_dist;
  std::array<RelationPlan, kRelationCount> rel;
};

// Disjoint union of `graphs`; node ids are offset per graph.
Plan make_plan(std::span<const SceneGraph> graphs) {
  Plan plan;
  std::size_t total = 0;
  for (const SceneGraph& g : graphs) total += g.node_count();
  plan.n = static_cast<int>(total);
  const int width = graphs.front().category_count() + 6;
  plan.features.resize(static_cast<Index>(total), width);
  for (auto& rp : plan.rel) rp.segments.assign(total, {});

  int offset = 0;
  for (const SceneGraph& g : graphs) {
    const int n = static_cast<int>(g.node_count());
    plan.features.middleRows(offset, n) = raw_features(g);
    plan.queries.push_back(offset + *g.query_node());
    std::vector<int> pair_of(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), -1);
    for (RelationType r : kAllRelations) {
      RelationPlan& rp = plan.rel[static_cast<std::size_t>(slot(r))];
      for (int i = 0; i < n; ++i) {
        const auto& em = g.emitters(i, r);
        if (em.empty()) continue;
        const int pos = static_cast<int>(rp.targets.size());
        rp.targets.push_back(offset + i);
        for (std::size_t s = 0; s < em.size(); ++s) {
          const int k = em[s];
          const int e = static_cast<int>(rp.src.size());
          int& pid = pair_of[static_cast<std::size_t>(k) * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)];
          if (pid < 0) {
            pid = static_cast<int>(plan.pair_src.size());
            plan.pair_src.push_back(offset + k);
            plan.pair_dst.push_back(offset + i);
            plan.pair_dist.push_back(centroid_distance(g.nodes()[static_cast<std::size_t>(k)].position,
                                                       g.nodes()[static_cast<std::size_t>(i)].position));
          }
          rp.src.push_back(offset + k);
          rp.dst.push_back(offset + i);
          rp.pair.push_back(pid);
          rp.segments[static_cast<std::size_t>(offset + i)].push_back(e);
          if (rp.step_rows.size() <= s) {
            rp.step_rows.resize(s + 1);
            rp.step_edges.resize(s + 1);
          }
          rp.step_rows[s].push_back(pos);
          rp.step_edges[s].push_back(e);
        }
      }
    }
    offset += n;
  }
  return plan;
}

// Attention weight per pair as a [pairs x 1] column; invalid when every
// weight is 1.
Var attention(Binder& p, const detail::Layout& layout, const ModelConfig& cfg, const Plan& plan, Var x) {
  if (plan.pair_src.empty()) return {};
  if (cfg.learned_attention()) {
    return ad::sigmoid(pair_mlp(p, layout.att, x, plan.pair_src, plan.pair_dst));
  }
  if (cfg.variant == Variant::DistWeights) {
    Matrix a(static_cast<Index>(plan.pair_dist.size()), 1);
    for (std::size_t i = 0; i < plan.pair_dist.size(); ++i) {
      a(static_cast<Index>(i), 0) = cfg.dist_c * std::exp(-plan.pair_dist[i] / cfg.dist_b);
    }
    return p.tape().constant(std::move(a));
  }
  return {};
}

Var aggregate_relation(Binder& p, const detail::Recurrent& rc, Aggregator agg, const RelationPlan& rp, Var msgs,
                       int n, int k) {
  Tape& t = p.tape();
  switch (agg) {
    case Aggregator::Sum: return ad::segment_sum(msgs, rp.segments);
    case Aggregator::Max: return ad::segment_max(msgs, rp.segments);
    case Aggregator::Gru:
    case Aggregator::VanillaRnn: break;
  }
  const auto width = static_cast<Index>(rp.targets.size());
  Var state = t.zeros(width, k);
  for (std::size_t s = 0; s < rp.step_rows.size(); ++s) {
    const auto& rows = rp.step_rows[s];
    const bool all = static_cast<Index>(rows.size()) == width;  // rows are ascending, so this is the identity
    Var cur = all ? state : ad::gather_rows(state, rows);
    Var in = ad::gather_rows(msgs, rp.step_edges[s]);
    Var next = agg == Aggregator::Gru
                   ? ad::gru_cell(cur, in, p(rc.w_ih), p(rc.w_hh), p(rc.b_ih), p(rc.b_hh))
                   : ad::tanh(ad::add(ad::affine(in, p(rc.w_ih), p(rc.b_ih)), ad::affine(cur, p(rc.w_hh))));
    state = all ? next : ad::row_update(state, rows, next);
  }
  if (width == n) return state;
  return ad::row_update(t.zeros(n, k), rp.targets, state);
}

void check_graph(const ModelConfig& cfg, const SceneGraph& g) {
  if (g.category_count() != cfg.categories) {
    throw std::invalid_argument("graph has " + std::to_string(g.category_count()) + " categories, model expects " +
                                std::to_string(cfg.categories));
  }
  const int q = g.query_count();
  if (q == 0) throw std::invalid_argument("graph has no query node");
  if (q > 1) throw std::invalid_argument("graph has more than one query node");
}

ForwardVars run(Binder& p, const detail::Layout& layout, const ModelConfig& cfg, const Plan& plan,
                ForwardTrace* trace) {
  Tape& t = p.tape();
  const int k = cfg.node_dim;
  if (plan.features.cols() != cfg.feature_dim()) throw std::invalid_argument("feature length differs from C + 6");
  Var x = t.constant(plan.features);
  Var h = mlp(p, layout.init, x);
  if (trace) trace->latents.push_back(h.value());
  Var att = attention(p, layout, cfg, plan, x);
  const Aggregator agg = cfg.aggregator();

  for (int it = 0; it < cfg.iterations; ++it) {
    std::vector<Var> parts{h};
    for (std::size_t r = 0; r < static_cast<std::size_t>(kRelationCount); ++r) {
      const RelationPlan& rp = plan.rel[r];
      if (rp.src.empty()) {
        parts.push_back(t.zeros(plan.n, k));
        continue;
      }
      Var msgs = pair_mlp(p, layout.msg[r], h, rp.src, rp.dst);
      Var w = att.valid() ? ad::gather_rows(att, rp.pair) : Var{};
      if (trace) {
        auto mv = msgs.value();
        for (std::size_t e = 0; e < rp.src.size(); ++e) {
          const auto row = mv.row(static_cast<Index>(e));
          trace->packets.push_back({it, rp.src[e], rp.dst[e], kAllRelations[r],
                                    std::vector<double>(row.data(), row.data() + row.size()),
                                    w.valid() ? w.value()(static_cast<Index>(e), 0) : 1.0});
        }
      }
      Var scaled = w.valid() ? ad::scale_rows(msgs, w) : msgs;
      parts.push_back(aggregate_relation(p, layout.rec[r], agg, rp, scaled, plan.n, k));
    }
    h = mlp(p, layout.upd, ad::concat_cols(parts));
    if (trace) trace->latents.push_back(h.value());
  }

  Var hq = ad::gather_rows(h, plan.queries);
  ForwardVars out;
  out.latent = hq;
  out.probs = ad::softmax(mlp(p, layout.pred, hq));
  out.size = mlp(p, layout.size, hq);
  return out;
}

ForwardVars forward_impl(Tape& tape, const Model& model, ModelParams* mut, std::span<const SceneGraph> graphs,
                         ForwardTrace* trace) {
  if (graphs.empty()) throw std::invalid_argument("empty batch");
  std::vector<SceneGraph> used;
  used.reserve(graphs.size());
  for (const SceneGraph& g : graphs) {
    check_graph(model.config, g);
    used.push_back(variant_graph(g, model.config.variant));
  }
  const detail::Layout layout = detail::resolve_layout(model.params, model.config);
  const Plan plan = make_plan(used);
  Binder binder(tape, model.params, mut);
  return run(binder, layout, model.config, plan, trace);
}

PredictionResult result_row(const ForwardVars& v, Index b) {
  PredictionResult out;
  auto p = v.probs.value();
  out.probs.assign(p.row(b).data(), p.row(b).data() + p.cols());
  auto s = v.size.value();
  out.size = {s(b, 0), s(b, 1), s(b, 2)};
  return out;
}

std::vector<double> row_vector(ad::ConstMatrixMap m) { return std::vector<double>(m.data(), m.data() + m.size()); }

Matrix as_row(std::span<const double> v) {
  Matrix m(1, static_cast<Index>(v.size()));
  std::copy(v.begin(), v.end(), m.data());
  return m;
}

class Unit {
 public:
  explicit Unit(const Model& m)
      : model(m), layout(detail::resolve_layout(m.params, m.config)), tape(false), bind(tape, m.params, nullptr) {}
  const Model& model;
  detail::Layout layout;
  Tape tape;
  Binder bind;
};

void require_length(std::span<const double> v, int n, const char* what) {
  if (static_cast<int>(v.size()) != n) {
    throw std::invalid_argument(std::string(what) + " has length " + std::to_string(v.size()) + ", expected " +
                                std::to_string(n));
  }
}

}  // namespace

SceneGraph variant_graph(const SceneGraph& graph, Variant variant) {
  switch (variant) {
    case Variant::Sparse:
      return graph.filtered([](const Edge& e) { return e.relation != RelationType::CoOccurring; });
    case Variant::CoOccurOnly:
      return graph.filtered([](const Edge& e) { return e.relation == RelationType::CoOccurring; });
    case Variant::Tree: break;
    default: return graph;
  }
  // Support edges are kept; a surrounding pair joins only when it links two
  // components that are still disconnected.
  const auto& nodes = graph.nodes();
  std::vector<int> root(nodes.size());
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](int a) {
    while (root[static_cast<std::size_t>(a)] != a) {
      root[static_cast<std::size_t>(a)] = root[static_cast<std::size_t>(root[static_cast<std::size_t>(a)])];
      a = root[static_cast<std::size_t>(a)];
    }
    return a;
  };
  std::vector<Edge> kept;
  for (const Edge& e : graph.edges()) {
    if (e.relation == RelationType::Supporting || e.relation == RelationType::SupportedBy) {
      kept.push_back(e);
      root[static_cast<std::size_t>(find(e.from))] = find(e.to);
    }
  }
  std::vector<Edge> surround;
  for (const Edge& e : graph.edges()) {
    if (e.relation == RelationType::Surrounding) surround.push_back(e);  // surrounder -> center
  }
  std::sort(surround.begin(), surround.end(), [&](const Edge& a, const Edge& b) {
    const auto& ca = nodes[static_cast<std::size_t>(a.to)].id;
    const auto& cb = nodes[static_cast<std::size_t>(b.to)].id;
    if (ca != cb) return ca < cb;
    return nodes[static_cast<std::size_t>(a.from)].id < nodes[static_cast<std::size_t>(b.from)].id;
  });
  for (const Edge& e : surround) {
    const int a = find(e.from);
    const int b = find(e.to);
    if (a == b) continue;
    root[static_cast<std::size_t>(a)] = b;
    kept.push_back(e);
    kept.push_back({e.to, e.from, RelationType::SurroundedBy});
  }
  return SceneGraph(nodes, std::move(kept), graph.bounds(), graph.category_count());
}

Matrix raw_features(const SceneGraph& graph) {
  const int c = graph.category_count();
  Matrix x = Matrix::Zero(static_cast<Index>(graph.node_count()), c + 6);
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    const GraphNode& n = graph.nodes()[i];
    const auto r = static_cast<Index>(i);
    if (!n.is_query) {
      if (n.category < 0 || n.category >= c) throw std::invalid_argument("node category outside the vocabulary");
      x(r, n.category) = 1.0;
      for (int a = 0; a < 3; ++a) x(r, c + 3 + a) = n.size[static_cast<std::size_t>(a)];
    }
    for (int a = 0; a < 3; ++a) x(r, c + a) = n.position[static_cast<std::size_t>(a)];
  }
  return x;
}

ForwardVars forward(Tape& tape, Model& model, const SceneGraph& graph, ForwardTrace* trace) {
  return forward_impl(tape, model, &model.params, std::span<const SceneGraph>(&graph, 1), trace);
}

ForwardVars forward_batch(Tape& tape, Model& model, std::span<const SceneGraph> graphs) {
  return forward_impl(tape, model, &model.params, graphs, nullptr);
}

PredictionResult predict(const Model& model, const SceneGraph& graph, ForwardTrace* trace) {
  Tape tape(false);
  return result_row(forward_impl(tape, model, nullptr, std::span<const SceneGraph>(&graph, 1), trace), 0);
}

std::vector<PredictionResult> predict_batch(const Model& model, std::span<const SceneGraph> graphs) {
  std::vector<PredictionResult> out;
  if (graphs.empty()) return out;
  Tape tape(false);
  const ForwardVars v = forward_impl(tape, model, nullptr, graphs, nullptr);
  for (std::size_t b = 0; b < graphs.size(); ++b) out.push_back(result_row(v, static_cast<Index>(b)));
  return out;
}

PredictionResult predict_at(const Model& model, const Scene& scene, const Vec3& p) {
  return predict(model, insert_query_node(build_graph(scene), p));
}

std::vector<double> edge_attention(const Model& model, const SceneGraph& graph) {
  const ModelConfig& cfg = model.config;
  std::vector<double> out(graph.edges().size(), 1.0);
  if (graph.edges().empty()) return out;
  if (cfg.variant == Variant::DistWeights) {
    for (std::size_t e = 0; e < out.size(); ++e) {
      const Edge& ed = graph.edges()[e];
      out[e] = cfg.dist_c * std::exp(-centroid_distance(graph.nodes()[static_cast<std::size_t>(ed.from)].position,
                                                        graph.nodes()[static_cast<std::size_t>(ed.to)].position) /
                                     cfg.dist_b);
    }
    return out;
  }
  if (!cfg.learned_attention()) return out;
  Unit u(model);
  std::vector<int> src, dst;
  for (const Edge& e : graph.edges()) {
    src.push_back(e.from);
    dst.push_back(e.to);
  }
  Var x = u.tape.constant(raw_features(graph));
  Var a = ad::sigmoid(pair_mlp(u.bind, u.layout.att, x, src, dst));
  auto av = a.value();
  for (std::size_t e = 0; e < out.size(); ++e) out[e] = av(static_cast<Index>(e), 0);
  return out;
}

std::vector<double> init_node(const Model& model, std::span<const double> features) {
  require_length(features, model.config.feature_dim(), "feature vector");
  Unit u(model);
  return row_vector(mlp(u.bind, u.layout.init, u.tape.constant(as_row(features))).value());
}

std::vector<double> compute_message(const Model& model, RelationType r, std::span<const double> h_from,
                                    std::span<const double> h_to) {
  require_length(h_from, model.config.node_dim, "emitter latent");
  require_length(h_to, model.config.node_dim, "receiver latent");
  const int s = slot(r);
  if (s < 0 || s >= kRelationCount) throw std::invalid_argument("unknown relation");
  Unit u(model);
  Matrix h(2, model.config.node_dim);
  h.row(0) = as_row(h_from);
  h.row(1) = as_row(h_to);
  const std::vector<int> src{0}, dst{1};
  return row_vector(
      pair_mlp(u.bind, u.layout.msg[static_cast<std::size_t>(s)], u.tape.constant(std::move(h)), src, dst).value());
}

double attention_weight(const Model& model, std::span<const double> x_from, std::span<const double> x_to) {
  const ModelConfig& cfg = model.config;
  require_length(x_from, cfg.feature_dim(), "emitter features");
  require_length(x_to, cfg.feature_dim(), "receiver features");
  if (cfg.variant == Variant::NoAttention) return 1.0;
  const auto c = static_cast<std::size_t>(cfg.categories);
  if (cfg.variant == Variant::DistWeights) {
    const Vec3 a{x_from[c], x_from[c + 1], x_from[c + 2]};
    const Vec3 b{x_to[c], x_to[c + 1], x_to[c + 2]};
    return cfg.dist_c * std::exp(-centroid_distance(a, b) / cfg.dist_b);
  }
  Unit u(model);
  Matrix x(2, cfg.feature_dim());
  x.row(0) = as_row(x_from);
  x.row(1) = as_row(x_to);
  const std::vector<int> src{0}, dst{1};
  return ad::sigmoid(pair_mlp(u.bind, u.layout.att, u.tape.constant(std::move(x)), src, dst)).value()(0, 0);
}

std::vector<double> aggregate(const Model& model, RelationType r, const std::vector<std::vector<double>>& messages,
                              std::span<const double> weights) {
  const int k = model.config.node_dim;
  if (weights.size() != messages.size()) throw std::invalid_argument("one weight per message required");
  if (messages.empty()) return std::vector<double>(static_cast<std::size_t>(k), 0.0);
  Unit u(model);
  Matrix m(static_cast<Index>(messages.size()), k);
  for (std::size_t e = 0; e < messages.size(); ++e) {
    require_length(messages[e], k, "message");
    m.row(static_cast<Index>(e)) = as_row(messages[e]) * weights[e];
  }
  RelationPlan rp;
  rp.targets = {0};
  rp.segments = {{}};
  for (std::size_t e = 0; e < messages.size(); ++e) {
    rp.segments[0].push_back(static_cast<int>(e));
    rp.step_rows.push_back({0});
    rp.step_edges.push_back({static_cast<int>(e)});
  }
  Var g = aggregate_relation(u.bind, u.layout.rec[static_cast<std::size_t>(slot(r))], model.config.aggregator(), rp,
                             u.tape.constant(std::move(m)), 1, k);
  return row_vector(g.value());
}

std::vector<double> update_node(const Model& model, std::span<const double> h,
                                const std::array<std::vector<double>, kRelationCount>& aggregated) {
  const int k = model.config.node_dim;
  require_length(h, k, "latent");
  Matrix in(1, (1 + kRelationCount) * k);
  in.leftCols(k) = as_row(h);
  for (std::size_t r = 0; r < static_cast<std::size_t>(kRelationCount); ++r) {
    require_length(aggregated[r], k, "aggregated message");
    in.middleCols(static_cast<Index>(r + 1) * k, k) = as_row(aggregated[r]);
  }
  Unit u(model);
  return row_vector(mlp(u.bind, u.layout.upd, u.tape.constant(std::move(in))).value());
}

PredictionResult decode_query(const Model& model, std::span<const double> h) {
  require_length(h, model.config.node_dim, "latent");
  Unit u(model);
  Var hv = u.tape.constant(as_row(h));
  PredictionResult out;
  out.probs = row_vector(ad::softmax(mlp(u.bind, u.layout.pred, hv)).value());
  auto s = mlp(u.bind, u.layout.size, hv).value();
  out.size = {s(0, 0), s(0, 1), s(0, 2)};
  return out;
}

}  // namespace sgnet
