// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "oracles/extraction_oracle.hpp"
#include "sgnet/generator.hpp"
#include "sgnet/relations.hpp"
#include "unit/test_util.hpp"

using namespace sgnet;
using sgnet::testing::box;
using sgnet::testing::small_vocab;
using sgnet::testing::table_scene;

namespace {

std::set<oracle::EdgeKey> edge_keys(const SceneGraph& g) {
  std::set<oracle::EdgeKey> out;
  for (const Edge& e : g.edges()) {
    out.insert({g.nodes()[static_cast<std::size_t>(e.from)].id, g.nodes()[static_cast<std::size_t>(e.to)].id,
                std::string(relation_name(e.relation))});
  }
  return out;
}

bool has_edge(const SceneGraph& g, const std::string& from, const std::string& to, RelationType r) {
  return edge_keys(g).count({from, to, std::string(relation_name(r))}) == 1;
}

Scene room_with(std::vector<SceneObject> extra, double size = 6.0) {
  std::vector<SceneObject> objs{box("floor", 0, {size / 2, size / 2, -0.05}, {size, size, 0.1}),
                                box("wall-south", 1, {size / 2, 0, 1.3}, {size, 0.1, 2.6})};
  for (auto& o : extra) objs.push_back(std::move(o));
  return Scene("test", small_vocab(), Bounds{{0, size}, {0, size}}, std::move(objs));
}

}  // namespace

TEST_CASE("supporting predicate") {
  auto table = box("t", 2, {1, 1, 0.375}, {1, 1, 0.75});
  CHECK(detect_supporting(box("l", 4, {1, 1, 0.752 + 0.1}, {0.2, 0.2, 0.2}), table));
  CHECK_FALSE(detect_supporting(box("l", 4, {1, 1, 0.90 + 0.1}, {0.2, 0.2, 0.2}), table));
  CHECK_FALSE(detect_supporting(box("l", 4, {3, 3, 0.752 + 0.1}, {0.2, 0.2, 0.2}), table));
  // Touching footprints have zero overlap area.
  CHECK_FALSE(detect_supporting(box("l", 4, {1.6, 1, 0.85}, {0.2, 0.2, 0.2}), table));
  // Penetration beyond the contact tolerance is not support.
  CHECK_FALSE(detect_supporting(box("l", 4, {1, 1, 0.8}, {0.2, 0.2, 0.2}), table));
}

TEST_CASE("next-to predicate") {
  const Scene s = room_with({box("bed-1", 2, {2, 2, 0.25}, {1.6, 2, 0.5}),
                             box("stand-1", 3, {3.15, 2, 0.25}, {0.5, 0.4, 0.5}),
                             box("lamp-1", 4, {3.15, 2, 0.6}, {0.2, 0.2, 0.2}),
                             box("chair-1", 3, {3.75, 2, 0.4}, {0.5, 0.5, 0.8}),
                             box("sofa-1", 5, {5.2, 4.8, 0.4}, {0.8, 0.8, 0.8}),
                             box("sofa-2", 5, {5.2, 2.6, 0.4}, {0.8, 0.8, 0.8})});
  const auto parents = supporting_parents(s);
  CHECK(detect_next_to(s, 2, 3, parents));   // gap 0.10 on the floor
  CHECK_FALSE(detect_next_to(s, 4, 5, parents));  // lamp on stand, chair on floor
  CHECK_FALSE(detect_next_to(s, 6, 7, parents));  // gap 1.4
  CHECK(parents[4] == std::optional<std::size_t>(3));
  CHECK(parents[0] == std::nullopt);
}

TEST_CASE("surrounding: mirrored nightstands around a bed") {
  auto make = [](double shift) {
    return room_with({box("bed-1", 2, {3, 3, 0.25}, {1.6, 2, 0.5}),
                      box("stand-1", 3, {1.9, 3.5, 0.25}, {0.5, 0.4, 0.5}),
                      box("stand-2", 3, {4.1 + shift, 3.5, 0.25}, {0.5, 0.4, 0.5})});
  };
  auto sets = detect_surrounding(make(0.0));
  bool found = false;
  for (auto& s : sets) {
    if (s.center == 2) {
      CHECK(s.surrounders == std::vector<std::size_t>{3, 4});
      found = true;
    }
  }
  CHECK(found);
  for (auto& s : detect_surrounding(make(0.3))) CHECK(s.center != 2);
}

TEST_CASE("surrounding: four chairs at quarter turns, jittered") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> j(-0.035, 0.035);
  std::vector<SceneObject> extra{box("table-1", 2, {3, 3, 0.375}, {1.0, 1.0, 0.75})};
  const double r = 0.9;
  const double angles[4] = {0.3, 0.3 + M_PI / 2, 0.3 + M_PI, 0.3 + 3 * M_PI / 2};
  for (int k = 0; k < 4; ++k) {
    extra.push_back(box("chair-" + std::to_string(k + 1), 3,
                        {3 + r * std::cos(angles[k]) + j(rng), 3 + r * std::sin(angles[k]) + j(rng), 0.425},
                        {0.45, 0.45, 0.85}));
  }
  const Scene s = room_with(extra);
  bool found = false;
  for (auto& set : detect_surrounding(s)) {
    if (set.center == 2) {
      CHECK(set.surrounders == std::vector<std::size_t>{3, 4, 5, 6});
      found = true;
    }
  }
  CHECK(found);
  CHECK(oracle::brute_force_edges(s) == edge_keys(build_graph(s)));
}

TEST_CASE("surrounding: size ratio and parent rules") {
  // Mirror-placed but one is 1.3x wider.
  const Scene a = room_with({box("bed-1", 2, {3, 3, 0.25}, {1.6, 2, 0.5}),
                             box("stand-1", 3, {1.9, 3.5, 0.25}, {0.5, 0.4, 0.5}),
                             box("stand-2", 3, {4.1, 3.5, 0.25}, {0.65, 0.4, 0.5})});
  for (auto& s : detect_surrounding(a)) CHECK(s.center != 2);
}

TEST_CASE("graph closure for floor plus one object") {
  const Scene s = room_with({box("bed-1", 2, {3, 3, 0.25}, {1.6, 2, 0.5})});
  const SceneGraph g = build_graph(s);
  CHECK(has_edge(g, "floor", "bed-1", RelationType::Supporting));
  CHECK(has_edge(g, "bed-1", "floor", RelationType::SupportedBy));
  CHECK(has_edge(g, "floor", "wall-south", RelationType::Supporting));
  for (auto* a : {"floor", "wall-south", "bed-1"}) {
    for (auto* b : {"floor", "wall-south", "bed-1"}) {
      if (std::string(a) != b) CHECK(has_edge(g, a, b, RelationType::CoOccurring));
    }
  }
  CHECK(g.edge_count(RelationType::CoOccurring) == 6);
}

TEST_CASE("graph invariants on generated scenes") {
  for (const Scene& s : generate_scenes(bedroom_rules(), 30, 21)) {
    const SceneGraph g = build_graph(s);
    const std::size_t n = g.node_count();
    CHECK(g.edge_count(RelationType::CoOccurring) == n * (n - 1));
    const auto keys = edge_keys(g);
    for (const Edge& e : g.edges()) {
      CHECK(e.from != e.to);
      const auto& f = g.nodes()[static_cast<std::size_t>(e.from)].id;
      const auto& t = g.nodes()[static_cast<std::size_t>(e.to)].id;
      CHECK(keys.count({t, f, std::string(relation_name(reverse(e.relation)))}) == 1);
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (RelationType r : kAllRelations) {
        const auto& em = g.emitters(static_cast<int>(i), r);
        for (std::size_t k = 1; k < em.size(); ++k) {
          const auto& a = g.nodes()[static_cast<std::size_t>(em[k - 1])];
          const auto& b = g.nodes()[static_cast<std::size_t>(em[k])];
          const double da = centroid_distance(a.position, g.nodes()[i].position);
          const double db = centroid_distance(b.position, g.nodes()[i].position);
          CHECK((da > db || (da == db && a.id < b.id)));
        }
      }
    }
  }
}

TEST_CASE("extraction is permutation invariant") {
  for (const Scene& s : generate_scenes(bedroom_rules(), 10, 4)) {
    auto objs = s.objects();
    std::mt19937_64 rng(9);
    std::shuffle(objs.begin(), objs.end(), rng);
    const Scene p(s.room_type(), s.vocab_ptr(), s.bounds(), objs);
    CHECK(edge_keys(build_graph(s)) == edge_keys(build_graph(p)));
  }
}

TEST_CASE("build_graph matches the brute-force oracle") {
  for (const Scene& s : generate_scenes(bedroom_rules(), 40, 77)) {
    CHECK(oracle::brute_force_edges(s) == edge_keys(build_graph(s)));
  }
  CHECK(oracle::brute_force_edges(table_scene()) == edge_keys(build_graph(table_scene())));
}

TEST_CASE("query insertion") {
  const Scene s = room_with({box("desk-1", 2, {3, 3, 0.375}, {1.2, 0.6, 0.75}),
                             box("chair-1", 3, {3, 3.7, 0.425}, {0.5, 0.5, 0.85})});
  const SceneGraph g = build_graph(s);

  SUBCASE("over open floor") {
    const SceneGraph q = insert_query_node(g, {1.0, 4.5, 0.02});
    REQUIRE(q.query_node().has_value());
    const int qi = *q.query_node();
    const auto& node = q.nodes()[static_cast<std::size_t>(qi)];
    CHECK(node.category == -1);
    CHECK(node.size == Vec3{0, 0, 0});
    CHECK(has_edge(q, kQueryNodeId, "floor", RelationType::SupportedBy));
    CHECK(q.emitters(qi, RelationType::Supporting) == std::vector<int>{static_cast<int>(*q.find("floor"))});
    CHECK_FALSE(has_edge(q, kQueryNodeId, "desk-1", RelationType::SupportedBy));
    for (std::size_t i = 0; i + 1 < q.node_count(); ++i) {
      CHECK(has_edge(q, kQueryNodeId, q.nodes()[i].id, RelationType::CoOccurring));
      CHECK(has_edge(q, q.nodes()[i].id, kQueryNodeId, RelationType::CoOccurring));
    }
    // Original edges are untouched.
    CHECK(q.edges().size() > g.edges().size());
  }
  SUBCASE("just above a desk") {
    const SceneGraph q = insert_query_node(g, {3.2, 3.1, 0.78});
    CHECK(has_edge(q, kQueryNodeId, "desk-1", RelationType::SupportedBy));
    CHECK(has_edge(q, "desk-1", kQueryNodeId, RelationType::Supporting));
    CHECK_FALSE(has_edge(q, kQueryNodeId, "floor", RelationType::SupportedBy));
    // Same parent rule: the chair stands on the floor, not on the desk.
    CHECK_FALSE(has_edge(q, kQueryNodeId, "chair-1", RelationType::NextTo));
  }
  SUBCASE("next to the desk on the floor") {
    const SceneGraph q = insert_query_node(g, {3.0, 2.3, 0.02});
    CHECK(has_edge(q, kQueryNodeId, "desk-1", RelationType::NextTo));
    CHECK(has_edge(q, "desk-1", kQueryNodeId, RelationType::NextTo));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(insert_query_node(g, {7.0, 1.0, 0.0}), std::out_of_range);
    CHECK_THROWS_AS(insert_query_node(g, {1.0, NAN, 0.0}), std::invalid_argument);
    const SceneGraph q = insert_query_node(g, {1.0, 1.0, 0.0});
    CHECK_THROWS_AS(insert_query_node(q, {1.0, 1.0, 0.0}), std::invalid_argument);
  }
}

TEST_CASE("query as a surrounded center") {
  const Scene s = room_with({box("stand-1", 3, {2.0, 3, 0.25}, {0.5, 0.4, 0.5}),
                             box("stand-2", 3, {4.0, 3, 0.25}, {0.5, 0.4, 0.5})});
  const SceneGraph q = insert_query_node(build_graph(s), {3.0, 3.0, 0.02});
  CHECK(has_edge(q, "stand-1", kQueryNodeId, RelationType::Surrounding));
  CHECK(has_edge(q, kQueryNodeId, "stand-2", RelationType::SurroundedBy));
}

TEST_CASE("graph json dump") {
  const SceneGraph q = insert_query_node(build_graph(table_scene()), {0.5, 0.5, 0.0});
  const auto j = graph_to_json(q);
  CHECK(j["nodes"].size() == q.node_count());
  CHECK(j["edges"].size() == q.edges().size());
  CHECK(j["nodes"].back()["category"].is_null());
  std::set<std::string> names;
  for (auto& e : j["edges"]) names.insert(e["relation"].get<std::string>());
  CHECK(names.count("co_occurring") == 1);
  CHECK(names.count("supported_by") == 1);
  CHECK(relation_from_name("next_to") == RelationType::NextTo);
  CHECK_THROWS(relation_from_name("beside"));
}
