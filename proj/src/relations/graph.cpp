// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sgnet/relations.hpp"

namespace sgnet {

std::string_view relation_name(RelationType r) {
  switch (r) {
    case RelationType::Supporting: return "supporting";
    case RelationType::SupportedBy: return "supported_by";
    case RelationType::Surrounding: return "surrounding";
    case RelationType::SurroundedBy: return "surrounded_by";
    case RelationType::NextTo: return "next_to";
    case RelationType::CoOccurring: return "co_occurring";
  }
  throw std::invalid_argument("unknown relation");
}

RelationType relation_from_name(std::string_view name) {
  for (RelationType r : kAllRelations) {
    if (relation_name(r) == name) return r;
  }
  throw std::invalid_argument("unknown relation '" + std::string(name) + "'");
}

RelationType reverse(RelationType r) {
  switch (r) {
    case RelationType::Supporting: return RelationType::SupportedBy;
    case RelationType::SupportedBy: return RelationType::Supporting;
    case RelationType::Surrounding: return RelationType::SurroundedBy;
    case RelationType::SurroundedBy: return RelationType::Surrounding;
    default: return r;
  }
}

double centroid_distance(const Vec3& a, const Vec3& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

SceneGraph::SceneGraph(std::vector<GraphNode> nodes, std::vector<Edge> edges, Bounds bounds, int category_count)
    : nodes_(std::move(nodes)), edges_(std::move(edges)), bounds_(bounds), category_count_(category_count) {
  const int n = static_cast<int>(nodes_.size());
  for (const Edge& e : edges_) {
    if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n) throw std::out_of_range("edge endpoint out of range");
    if (e.from == e.to) throw std::invalid_argument("self edges are not allowed");
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

  for (auto& lists : emitters_) lists.assign(nodes_.size(), {});
  for (const Edge& e : edges_) {
    emitters_[static_cast<std::size_t>(slot(e.relation))][static_cast<std::size_t>(e.to)].push_back(e.from);
  }
  for (auto& lists : emitters_) {
    for (std::size_t i = 0; i < lists.size(); ++i) {
      const Vec3& target = nodes_[i].position;
      std::sort(lists[i].begin(), lists[i].end(), [&](int a, int b) {
        const double da = centroid_distance(nodes_[static_cast<std::size_t>(a)].position, target);
        const double db = centroid_distance(nodes_[static_cast<std::size_t>(b)].position, target);
        if (da != db) return da > db;
        return nodes_[static_cast<std::size_t>(a)].id < nodes_[static_cast<std::size_t>(b)].id;
      });
    }
  }
}

std::size_t SceneGraph::edge_count(RelationType r) const {
  return static_cast<std::size_t>(
      std::count_if(edges_.begin(), edges_.end(), [r](const Edge& e) { return e.relation == r; }));
}

std::optional<int> SceneGraph::query_node() const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].is_query) return static_cast<int>(i);
  }
  return std::nullopt;
}

int SceneGraph::query_count() const {
  return static_cast<int>(std::count_if(nodes_.begin(), nodes_.end(), [](const GraphNode& n) { return n.is_query; }));
}

std::optional<int> SceneGraph::find(const std::string& id) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id == id) return static_cast<int>(i);
  }
  return std::nullopt;
}

namespace {

void add_pair(std::vector<Edge>& edges, int from, int to, RelationType r) {
  edges.push_back({from, to, r});
  edges.push_back({to, from, reverse(r)});
}

SceneObject as_object(const GraphNode& n) { return SceneObject{n.id, n.category, n.position, n.size}; }

}  // namespace

SceneGraph build_graph(const Scene& scene, const RelationThresholds& t) {
  const auto& objs = scene.objects();
  const auto parents = supporting_parents(scene, t);
  const int n = static_cast<int>(objs.size());

  std::vector<GraphNode> nodes;
  nodes.reserve(objs.size());
  for (std::size_t i = 0; i < objs.size(); ++i) {
    GraphNode node{objs[i].id, objs[i].category, objs[i].position, objs[i].size, false, i == scene.floor_index(),
                   parents[i] ? static_cast<int>(*parents[i]) : -1};
    nodes.push_back(std::move(node));
  }

  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      if (i == k) continue;
      // k rests on i: i supports k.
      if (detect_supporting(objs[static_cast<std::size_t>(k)], objs[static_cast<std::size_t>(i)], t)) {
        add_pair(edges, i, k, RelationType::Supporting);
      }
    }
  }
  for (const SurroundingSet& set : detect_surrounding(scene, t)) {
    for (std::size_t s : set.surrounders) {
      add_pair(edges, static_cast<int>(s), static_cast<int>(set.center), RelationType::Surrounding);
    }
  }
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (detect_next_to(scene, static_cast<std::size_t>(a), static_cast<std::size_t>(b), parents, t)) {
        add_pair(edges, a, b, RelationType::NextTo);
      }
      add_pair(edges, a, b, RelationType::CoOccurring);
    }
  }
  return SceneGraph(std::move(nodes), std::move(edges), scene.bounds(), scene.vocab().size());
}

SceneGraph insert_query_node(const SceneGraph& graph, const Vec3& p, const RelationThresholds& t) {
  for (double v : p) {
    if (!std::isfinite(v)) throw std::invalid_argument("query position must be finite");
  }
  if (graph.query_count() > 0) throw std::invalid_argument("graph already contains a query node");
  if (graph.find(kQueryNodeId)) throw std::invalid_argument("object id collides with the query node id");
  if (!graph.bounds().contains_xy(p[0], p[1])) throw std::out_of_range("query lies outside the scene bounds");

  std::vector<GraphNode> nodes = graph.nodes();
  std::vector<Edge> edges = graph.edges();
  const int q = static_cast<int>(nodes.size());
  int floor = -1;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].is_floor) floor = static_cast<int>(i);
  }

  // Support: the highest top surface within support_gap below p whose
  // footprint contains p; otherwise the floor when p is near floor level.
  int parent = -1;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const GraphNode& n = nodes[i];
    if (n.is_floor) continue;
    const SceneObject box = as_object(n);
    const double gap = p[2] - box.top();
    const bool inside = p[0] >= box.min(0) && p[0] <= box.max(0) && p[1] >= box.min(1) && p[1] <= box.max(1);
    if (gap < 0.0 || gap > t.support_gap || !inside) continue;
    if (parent < 0 || box.top() > as_object(nodes[static_cast<std::size_t>(parent)]).top() ||
        (box.top() == as_object(nodes[static_cast<std::size_t>(parent)]).top() &&
         n.id < nodes[static_cast<std::size_t>(parent)].id)) {
      parent = static_cast<int>(i);
    }
  }
  if (parent >= 0) {
    add_pair(edges, parent, q, RelationType::Supporting);
  } else if (floor >= 0 && p[2] <= t.support_gap) {
    parent = floor;
    add_pair(edges, parent, q, RelationType::Supporting);
  }
  const int effective_parent = parent >= 0 ? parent : floor;

  GraphNode query{kQueryNodeId, -1, p, {0.0, 0.0, 0.0}, true, false, effective_parent};
  const SceneObject point = as_object(query);

  std::vector<SceneObject> objects;
  std::vector<std::optional<std::size_t>> parents;
  for (const GraphNode& n : nodes) {
    objects.push_back(as_object(n));
    parents.push_back(n.parent >= 0 ? std::optional<std::size_t>(static_cast<std::size_t>(n.parent)) : std::nullopt);
  }
  for (std::size_t s : find_surrounders(objects, parents, std::nullopt, p, t)) {
    add_pair(edges, static_cast<int>(s), q, RelationType::Surrounding);
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const int k = static_cast<int>(i);
    if (effective_parent >= 0 && nodes[i].parent == effective_parent &&
        horizontal_gap(point, objects[i]) <= t.next_to_gap) {
      add_pair(edges, k, q, RelationType::NextTo);
    }
    add_pair(edges, k, q, RelationType::CoOccurring);
  }

  nodes.push_back(std::move(query));
  return SceneGraph(std::move(nodes), std::move(edges), graph.bounds(), graph.category_count());
}

nlohmann::json graph_to_json(const SceneGraph& graph) {
  using nlohmann::json;
  json nodes = json::array();
  for (const GraphNode& n : graph.nodes()) {
    json node{{"id", n.id},
              {"position", {n.position[0], n.position[1], n.position[2]}},
              {"size", {n.size[0], n.size[1], n.size[2]}},
              {"query", n.is_query}};
    node["category"] = n.category >= 0 ? json(n.category) : json(nullptr);
    nodes.push_back(std::move(node));
  }
  json edges = json::array();
  for (const Edge& e : graph.edges()) {
    edges.push_back({{"from", graph.nodes()[static_cast<std::size_t>(e.from)].id},
                     {"to", graph.nodes()[static_cast<std::size_t>(e.to)].id},
                     {"relation", std::string(relation_name(e.relation))}});
  }
  return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

}  // namespace sgnet
