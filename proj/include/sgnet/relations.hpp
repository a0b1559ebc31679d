// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
//
// Typed relationship extraction and the dense message-passing graph.
#pragma once

#include <array>
#include <json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sgnet/scene.hpp"

namespace sgnet {

/// Order is the slot order used when aggregated messages are concatenated.
enum class RelationType : int {
  Supporting = 0,
  SupportedBy = 1,
  Surrounding = 2,
  SurroundedBy = 3,
  NextTo = 4,
  CoOccurring = 5,
};
inline constexpr int kRelationCount = 6;
inline constexpr std::array<RelationType, kRelationCount> kAllRelations{
    RelationType::Supporting, RelationType::SupportedBy, RelationType::Surrounding,
    RelationType::SurroundedBy, RelationType::NextTo, RelationType::CoOccurring};

std::string_view relation_name(RelationType r);
RelationType relation_from_name(std::string_view name);
RelationType reverse(RelationType r);
inline int slot(RelationType r) { return static_cast<int>(r); }

struct RelationThresholds {
  double support_gap = 0.05;      // max bottom-to-top distance for support
  double surround_match = 0.2;    // max centroid mismatch under symmetry
  double surround_size_ratio = 1.2;
  double next_to_gap = 0.5;
  int max_surround_set = 6;
};

/// True when `upper` rests on `lower`: upper's bottom is at most
/// `support_gap` above lower's top and their footprints share positive area.
bool detect_supporting(const SceneObject& upper, const SceneObject& lower,
                       const RelationThresholds& t = {});

bool footprints_overlap(const SceneObject& a, const SceneObject& b);
/// Horizontal distance between two footprints (0 when they overlap or touch).
double horizontal_gap(const SceneObject& a, const SceneObject& b);

/// Supporting parent of every object: the supporter with the highest top
/// (ties: smaller id). Objects without a detected supporter default to the
/// floor; the floor itself has none.
std::vector<std::optional<std::size_t>> supporting_parents(const Scene& scene,
                                                           const RelationThresholds& t = {});

/// Same parent and horizontal gap no larger than the threshold.
bool detect_next_to(const Scene& scene, std::size_t a, std::size_t b,
                    const std::vector<std::optional<std::size_t>>& parents,
                    const RelationThresholds& t = {});

struct SurroundingSet {
  std::size_t center;
  std::vector<std::size_t> surrounders;  // ascending object index
};

/// Per center object, the union of all surrounder sets (2..max_surround_set
/// members on a common parent, pairwise size ratio below the limit) that are
/// closed under a mirror through a vertical axis-aligned plane containing the
/// center's centroid, or under rotation by 2*pi/n about the center's vertical
/// axis, n being the set size. Centers without surrounders are omitted.
std::vector<SurroundingSet> detect_surrounding(const Scene& scene, const RelationThresholds& t = {});

/// Union of surrounder sets around `center` drawn from `objects` (skipping
/// `exclude`, the center object itself when there is one). `parents` holds
/// each object's supporting parent.
std::vector<std::size_t> find_surrounders(const std::vector<SceneObject>& objects,
                                          const std::vector<std::optional<std::size_t>>& parents,
                                          std::optional<std::size_t> exclude, const Vec3& center,
                                          const RelationThresholds& t = {});

struct GraphNode {
  std::string id;
  int category = -1;  // -1 for the query node
  Vec3 position{};
  Vec3 size{};        // zero for the query node
  bool is_query = false;
  bool is_floor = false;
  int parent = -1;    // supporting parent node, -1 for none (the floor)
};

struct Edge {
  int from = 0;
  int to = 0;
  RelationType relation = RelationType::CoOccurring;

  auto operator<=>(const Edge&) const = default;
};

inline constexpr const char* kQueryNodeId = "__query__";

/// Typed directed multigraph over scene objects plus an optional query node.
/// Edges are stored sorted and deduplicated; per-(node, relation) emitter
/// lists run from the furthest to the closest centroid (ties: ascending id).
class SceneGraph {
 public:
  SceneGraph() = default;
  SceneGraph(std::vector<GraphNode> nodes, std::vector<Edge> edges, Bounds bounds, int category_count);

  const std::vector<GraphNode>& nodes() const noexcept { return nodes_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Bounds& bounds() const noexcept { return bounds_; }
  int category_count() const noexcept { return category_count_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }

  const std::vector<int>& emitters(int node, RelationType r) const {
    return emitters_[static_cast<std::size_t>(slot(r))][static_cast<std::size_t>(node)];
  }
  std::size_t edge_count(RelationType r) const;
  std::optional<int> query_node() const;
  int query_count() const;
  std::optional<int> find(const std::string& id) const;

  /// Keeps only the edges for which `keep` returns true.
  template <typename Pred>
  SceneGraph filtered(Pred keep) const {
    std::vector<Edge> kept;
    for (const Edge& e : edges_) {
      if (keep(e)) kept.push_back(e);
    }
    return SceneGraph(nodes_, std::move(kept), bounds_, category_count_);
  }

 private:
  std::vector<GraphNode> nodes_;
  std::vector<Edge> edges_;
  Bounds bounds_{};
  int category_count_ = 0;
  std::array<std::vector<std::vector<int>>, kRelationCount> emitters_;
};

double centroid_distance(const Vec3& a, const Vec3& b);

SceneGraph build_graph(const Scene& scene, const RelationThresholds& t = {});

/// Adds the zero-featured query node at `p`. Throws std::out_of_range when p
/// lies outside the scene bounds horizontally and std::invalid_argument when
/// p is not finite or the graph already has a query node.
SceneGraph insert_query_node(const SceneGraph& graph, const Vec3& p, const RelationThresholds& t = {});

nlohmann::json graph_to_json(const SceneGraph& graph);

}  // namespace sgnet
