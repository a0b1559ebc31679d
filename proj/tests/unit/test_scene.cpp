// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <set>

#include "sgnet/dataset.hpp"
#include "sgnet/generator.hpp"
#include "sgnet/scene_json.hpp"
#include "unit/test_util.hpp"

using namespace sgnet;
using sgnet::testing::box;
using sgnet::testing::small_vocab;
using sgnet::testing::table_scene;

namespace {

std::string error_path(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const SceneError& e) {
    return e.path();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("vocabulary rules") {
  CHECK_THROWS(CategoryVocab({"floor", "wall"}));
  CHECK_THROWS(CategoryVocab({"floor", "chair", "bed"}));
  CHECK_THROWS(CategoryVocab({"floor", "wall", "bed", "bed"}));
  CategoryVocab v({"floor", "wall", "bed"});
  CHECK(v.index("bed") == 2);
  CHECK(v.floor_index() == 0);
  CHECK(v.is_structural(1));
  CHECK_FALSE(v.is_structural(2));
  CHECK_FALSE(v.find("sofa").has_value());
  CHECK(v.hash() == CategoryVocab({"floor", "wall", "bed"}).hash());
  CHECK(v.hash() != CategoryVocab({"floor", "wall", "sofa"}).hash());
  CHECK(v.hash_hex().size() == 16);
}

TEST_CASE("scene validation reports the offending field") {
  auto v = small_vocab();
  const Bounds b{{0, 4}, {0, 4}};
  auto floor = box("floor", 0, {2, 2, -0.05}, {4, 4, 0.1});
  auto wall = box("wall-south", 1, {2, 0, 1.3}, {4, 0.1, 2.6});

  CHECK(error_path([&] { Scene("r", v, b, {wall}); }) == "objects");
  CHECK(error_path([&] { Scene("r", v, b, {floor}); }) == "objects");
  CHECK(error_path([&] { Scene("r", v, b, {floor, wall, box("x", 2, {1, 1, 0.5}, {1, 0, 1})}); }) ==
        "objects[2].size[1]");
  CHECK(error_path([&] { Scene("r", v, b, {floor, wall, box("x", 2, {5, 1, 0.5}, {1, 1, 1})}); }) ==
        "objects[2].position");
  CHECK(error_path([&] { Scene("r", v, b, {floor, wall, box("floor", 2, {1, 1, 0.5}, {1, 1, 1})}); }) ==
        "objects[2].id");
  CHECK(error_path([&] { Scene("r", v, b, {floor, wall, box("x", 2, {NAN, 1, 0.5}, {1, 1, 1})}); }) ==
        "objects[2].position[0]");
}

TEST_CASE("scene json round trip is byte identical") {
  const Scene s = table_scene();
  const std::string text = scene_to_canonical_json(s);
  CHECK(text.find(' ') == std::string::npos);
  const Scene back = parse_scene(text);
  CHECK(scene_to_canonical_json(back) == text);

  for (const Scene& g : generate_scenes(bedroom_rules(), 20, 7)) {
    const std::string t = scene_to_canonical_json(g);
    CHECK(scene_to_canonical_json(parse_scene(t)) == t);
    // Generated values are already at serializer precision.
    CHECK(parse_scene(t) == Scene(g.room_type(), g.vocab_ptr(), g.bounds(), [&] {
            auto objs = g.objects();
            std::sort(objs.begin(), objs.end(), [](auto& a, auto& b) { return a.id < b.id; });
            return objs;
          }()));
  }
}

TEST_CASE("scene parse errors") {
  CHECK_THROWS_AS(parse_scene("{not json"), SceneError);
  auto doc = scene_to_json(table_scene());
  doc["objects"][3]["category"] = "piano";
  CHECK(error_path([&] { scene_from_json(doc); }) == "objects[3].category");
  doc = scene_to_json(table_scene());
  doc["format"] = "other/2";
  CHECK(error_path([&] { scene_from_json(doc); }) == "format");
  doc = scene_to_json(table_scene());
  doc["objects"][0].erase("size");
  CHECK(error_path([&] { scene_from_json(doc); }) == "objects[0].size");
  CHECK_THROWS_WITH_AS(load_scene("/nonexistent/scene.json"), doctest::Contains("/nonexistent/scene.json"),
                       SceneError);
}

TEST_CASE("canonical dump normalizes numbers") {
  nlohmann::json j = {{"b", -0.0}, {"a", 0.1 + 0.2}, {"c", 3}};
  CHECK(canonical_dump(j) == R"({"a":0.3,"b":0,"c":3})");
  CHECK(round_sig9(0.1 + 0.2) == 0.3);
}

TEST_CASE("remove-one-object samples") {
  const Scene s = table_scene();
  const auto sample = make_training_sample_at(s, 4);
  CHECK(sample.removed_id == "lamp-1");
  CHECK(sample.target_category == 4);
  CHECK(sample.query == Vec3{2.2, 2.1, 0.975});
  CHECK(sample.scene.size() == s.size() - 1);
  CHECK_FALSE(sample.scene.find("lamp-1").has_value());
  CHECK_THROWS(make_training_sample_at(s, 0));
  CHECK_THROWS(make_training_sample_at(s, 1));
}

TEST_CASE("random removal is uniform over non-structural objects") {
  // Chi-square goodness of fit against the uniform multinomial.
  const Scene s = table_scene();
  Rng rng(2024);
  std::map<std::string, int> counts;
  const int n = 8000;
  for (int i = 0; i < n; ++i) counts[make_training_sample(s, rng).removed_id]++;
  REQUIRE(counts.size() == 4);
  CHECK(counts.count("floor") == 0);
  const double expected = n / 4.0;
  double chi2 = 0.0;
  for (auto& [id, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 16.27);  // 99.9% quantile, 3 degrees of freedom
}

TEST_CASE("uniform_index is unbiased and in range") {
  Rng rng(1);
  std::vector<int> counts(3, 0);
  for (int i = 0; i < 30000; ++i) counts[uniform_index(rng, 3)]++;
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - 10000.0) * (c - 10000.0) / 10000.0;
  CHECK(chi2 < 13.82);  // 99.9% quantile, 2 degrees of freedom
  CHECK_THROWS(uniform_index(rng, 0));
  for (int i = 0; i < 1000; ++i) {
    const double u = uniform_real(rng, -1.0, 2.0);
    CHECK((u >= -1.0 && u < 2.0));
  }
}

namespace {

// Independent re-statement of the bedroom rules as predicates over a finished
// scene.
struct RuleChecker {
  const Scene& s;
  const CategoryVocab& v;
  double width, depth;

  std::vector<const SceneObject*> of(const std::string& cat) const {
    std::vector<const SceneObject*> out;
    for (auto& o : s.objects()) {
      if (o.category == v.index(cat)) out.push_back(&o);
    }
    return out;
  }

  bool against_wall(const SceneObject& o) const {
    const double t = 0.05;
    auto near = [](double a, double b) { return std::abs(a - b) < 1e-6; };
    const Bounds& b = s.bounds();
    return near(o.min(0), b.x[0] + t) || near(o.min(1), b.y[0] + t) || near(o.max(0), b.x[1] - t) ||
           near(o.max(1), b.y[1] - t);
  }

  static bool overlap3(const SceneObject& a, const SceneObject& b) {
    for (int k = 0; k < 3; ++k) {
      if (std::min(a.max(k), b.max(k)) - std::max(a.min(k), b.min(k)) <= 1e-6) return false;  // touching within rounding
    }
    return true;
  }

  static double gap_along(const SceneObject& a, const SceneObject& b, int axis) {
    return std::max(a.min(axis) - b.max(axis), b.min(axis) - a.max(axis));
  }
};

}  // namespace

TEST_CASE("bedroom generator obeys its placement rules") {
  const auto rules = bedroom_rules();
  int lamps = 0, desks = 0, tvs = 0;
  for (const Scene& s : generate_scenes(rules, 300, 11)) {
    RuleChecker rc{s, s.vocab(), s.bounds().x[1] - s.bounds().x[0], s.bounds().y[1] - s.bounds().y[0]};
    REQUIRE(rc.of("floor").size() == 1);
    REQUIRE(rc.of("wall").size() == 4);

    auto beds = rc.of("bed");
    REQUIRE(beds.size() == 1);
    CHECK(rc.against_wall(*beds[0]));
    CHECK(beds[0]->bottom() == doctest::Approx(0.0).epsilon(1e-6));

    auto stands = rc.of("nightstand");
    REQUIRE(stands.size() == 2);
    for (auto* n : stands) {
      CHECK(rc.against_wall(*n));
      const int axis = std::abs(n->position[0] - beds[0]->position[0]) > std::abs(n->position[1] - beds[0]->position[1]) ? 0 : 1;
      const double gap = RuleChecker::gap_along(*n, *beds[0], axis);
      CHECK(gap >= 0.02 - 1e-6);
      CHECK(gap <= 0.08 + 1e-6);
    }

    auto lamp_list = rc.of("lamp");
    CHECK(lamp_list.size() <= 2);
    lamps += static_cast<int>(lamp_list.size());
    for (auto* l : lamp_list) {
      int supported = 0;
      for (auto* n : stands) {
        if (std::abs(l->bottom() - n->top()) < 1e-6 && std::abs(l->position[0] - n->position[0]) <= 0.03 + 1e-9 &&
            std::abs(l->position[1] - n->position[1]) <= 0.03 + 1e-9) {
          ++supported;
        }
      }
      CHECK(supported == 1);
    }

    auto desk = rc.of("desk");
    auto chair = rc.of("chair");
    CHECK(desk.size() == chair.size());
    if (!desk.empty()) {
      ++desks;
      CHECK(rc.against_wall(*desk[0]));
      const double gx = RuleChecker::gap_along(*desk[0], *chair[0], 0);
      const double gy = RuleChecker::gap_along(*desk[0], *chair[0], 1);
      const double gap = std::max(gx, gy);
      CHECK(gap >= 0.05 - 1e-6);
      CHECK(gap <= 0.15 + 1e-6);
    }

    auto tv = rc.of("tv");
    auto sofa = rc.of("sofa");
    CHECK(tv.size() == sofa.size());
    if (!tv.empty()) {
      ++tvs;
      CHECK(tv[0]->bottom() == doctest::Approx(1.0).epsilon(1e-6));
      CHECK(rc.against_wall(*sofa[0]));
      // Opposite walls: the tv-to-sofa separation spans the room.
      const double span = std::max(std::abs(tv[0]->position[0] - sofa[0]->position[0]) / rc.width,
                                   std::abs(tv[0]->position[1] - sofa[0]->position[1]) / rc.depth);
      CHECK(span > 0.5);
    }

    for (auto& a : s.objects()) {
      for (auto& b : s.objects()) {
        if (&a >= &b || s.vocab().is_structural(a.category) || s.vocab().is_structural(b.category)) continue;
        CHECK_FALSE(RuleChecker::overlap3(a, b));
      }
      CHECK(s.bounds().contains_xy(a.position[0], a.position[1]));
    }
  }
  // Composition probabilities: lamps 0.8 per stand, desk 0.5, tv 0.5.
  CHECK(lamps == doctest::Approx(480).epsilon(0.1));
  CHECK(desks == doctest::Approx(150).epsilon(0.2));
  CHECK(tvs == doctest::Approx(150).epsilon(0.2));
}

TEST_CASE("generator is deterministic per seed") {
  auto a = generate_scenes(bedroom_rules(), 5, 3);
  auto b = generate_scenes(bedroom_rules(), 5, 3);
  auto c = generate_scenes(bedroom_rules(), 5, 4);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  CHECK_FALSE(a[0] == c[0]);
}

TEST_CASE("generated rooms are centered on the origin") {
  for (const auto& rules : {bedroom_rules(), long_range_rules(), size_probe_rules()}) {
    for (const Scene& s : generate_scenes(rules, 20, 5)) {
      CHECK(s.bounds().x[0] == doctest::Approx(-s.bounds().x[1]).epsilon(1e-8));
      CHECK(s.bounds().y[0] == doctest::Approx(-s.bounds().y[1]).epsilon(1e-8));
      const SceneObject& floor = s.objects()[*s.find("floor")];
      CHECK(floor.position[0] == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
      CHECK(floor.position[1] == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
      CHECK(floor.top() == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
    }
  }
}

TEST_CASE("long-range generator isolates the tv") {
  int with_tv = 0;
  for (const Scene& s : generate_scenes(long_range_rules(), 200, 5)) {
    const auto& v = s.vocab();
    const SceneObject* target = nullptr;
    const SceneObject* tv = nullptr;
    for (auto& o : s.objects()) {
      if (o.category == v.index("sofa") || o.category == v.index("desk")) target = &o;
      if (o.category == v.index("tv")) tv = &o;
    }
    REQUIRE(target != nullptr);
    CHECK(target->bottom() == doctest::Approx(0.0).epsilon(1e-6));
    CHECK((tv != nullptr) == (target->category == v.index("sofa")));
    if (tv) {
      ++with_tv;
      CHECK(tv->bottom() == doctest::Approx(1.5).epsilon(1e-6));
      for (auto& o : s.objects()) {
        if (&o == tv || o.category == v.floor_index()) continue;
        const double dx = std::max({0.0, o.min(0) - tv->max(0), tv->min(0) - o.max(0)});
        const double dy = std::max({0.0, o.min(1) - tv->max(1), tv->min(1) - o.max(1)});
        CHECK(std::hypot(dx, dy) > 0.6);
      }
    }
  }
  CHECK(with_tv == doctest::Approx(100).epsilon(0.25));
}

TEST_CASE("dataset split") {
  auto split = split_dataset(2000, 9);
  CHECK(split.train.size() == 1600);
  CHECK(split.val.size() == 200);
  CHECK(split.test.size() == 200);
  std::set<std::size_t> all;
  for (auto* part : {&split.train, &split.val, &split.test}) all.insert(part->begin(), part->end());
  CHECK(all.size() == 2000);
  CHECK(split_dataset(2000, 9).test == split.test);
  CHECK_FALSE(split_dataset(2000, 10).test == split.test);
  CHECK_THROWS(split_dataset(9, 1));
}

TEST_CASE("scene directory round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "sgnet_test_scene_dir";
  std::filesystem::remove_all(dir);
  auto scenes = generate_scenes(bedroom_rules(), 3, 1);
  save_scene_dir(scenes, dir.string());
  auto back = load_scene_dir(dir.string());
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(scene_to_canonical_json(back[i]) == scene_to_canonical_json(scenes[i]));
  std::filesystem::remove_all(dir);
}
