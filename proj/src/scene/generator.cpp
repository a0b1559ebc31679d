// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
#include "sgnet/generator.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace sgnet {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

bool boxes_overlap(const SceneObject& a, const SceneObject& b) {
  for (int axis = 0; axis < 3; ++axis) {
    if (std::min(a.max(axis), b.max(axis)) - std::max(a.min(axis), b.min(axis)) <= 1e-9) return false;
  }
  return true;
}

double horizontal_gap(const SceneObject& a, const SceneObject& b) {
  double dx = std::max({0.0, a.min(0) - b.max(0), b.min(0) - a.max(0)});
  double dy = std::max({0.0, a.min(1) - b.max(1), b.min(1) - a.max(1)});
  return std::hypot(dx, dy);
}

WallSide opposite(WallSide side) {
  switch (side) {
    case WallSide::South: return WallSide::North;
    case WallSide::North: return WallSide::South;
    case WallSide::West: return WallSide::East;
    case WallSide::East: return WallSide::West;
  }
  return side;
}

// Composition decided before placement so that retries never change which
// objects a scene contains.
struct Composition {
  bool nightstands = false;
  std::array<bool, 2> lamps{false, false};
  bool desk = false;
  std::vector<bool> against_wall;  // one per AgainstWall rule, in order
  bool tv = false;
  bool long_range_tv = false;
};

class Builder {
 public:
  Builder(const GeneratorRules& rules, std::shared_ptr<const CategoryVocab> vocab, Rng& rng)
      : rules_(rules), vocab_(std::move(vocab)), rng_(rng) {}

  std::optional<Scene> attempt(const Composition& comp) {
    objects_.clear();
    counters_.clear();
    has_bed_ = false;
    nightstands_.clear();
    width_ = round_sig9(uniform_real(rng_, rules_.room_width[0], rules_.room_width[1]));
    depth_ = round_sig9(uniform_real(rng_, rules_.room_depth[0], rules_.room_depth[1]));
    add_structure();

    std::size_t against_wall_index = 0;
    for (const PlacementRule& rule : rules_.placement) {
      bool ok = std::visit(
          [&](const auto& r) { return apply(r, comp, against_wall_index); }, rule);
      if (!ok) return std::nullopt;
    }
    // Rooms are laid out from the south-west corner, then centered on the
    // origin.
    const double cx = width_ / 2;
    const double cy = depth_ / 2;
    for (auto& o : objects_) {
      o.position[0] -= cx;
      o.position[1] -= cy;
      for (int a = 0; a < 3; ++a) {
        o.position[a] = round_sig9(o.position[a]);
        o.size[a] = round_sig9(o.size[a]);
      }
    }
    Bounds bounds{{round_sig9(-cx), round_sig9(width_ - cx)}, {round_sig9(-cy), round_sig9(depth_ - cy)}};
    return Scene(rules_.room_type, vocab_, bounds, objects_);
  }

 private:
  double half_wall() const { return 0.5 * rules_.wall_thickness; }
  double wall_length(WallSide side) const {
    return side == WallSide::South || side == WallSide::North ? width_ : depth_;
  }

  std::string next_id(const std::string& category) {
    return category + "-" + std::to_string(++counters_[category]);
  }

  Vec3 noisy_extents(const std::string& category) {
    auto it = rules_.extents.find(category);
    if (it == rules_.extents.end()) throw GenerationError("no extents configured for category '" + category + "'");
    Vec3 e = it->second;
    for (double& v : e) {
      v += uniform_real(rng_, -rules_.size_noise, rules_.size_noise);
      if (v <= 0.0) throw GenerationError("size noise produced a non-positive extent for '" + category + "'");
    }
    return e;
  }

  void add_structure() {
    const double h = rules_.wall_height;
    const double t = rules_.wall_thickness;
    objects_.push_back({"floor", vocab_->floor_index(), {width_ / 2, depth_ / 2, -rules_.floor_thickness / 2},
                        {width_, depth_, rules_.floor_thickness}});
    const int wall = vocab_->wall_index();
    objects_.push_back({"wall-south", wall, {width_ / 2, 0.0, h / 2}, {width_ + t, t, h}});
    objects_.push_back({"wall-north", wall, {width_ / 2, depth_, h / 2}, {width_ + t, t, h}});
    objects_.push_back({"wall-west", wall, {0.0, depth_ / 2, h / 2}, {t, depth_ + t, h}});
    objects_.push_back({"wall-east", wall, {width_, depth_ / 2, h / 2}, {t, depth_ + t, h}});
  }

  // Box with its back face `offset` meters in front of the wall's inner face.
  SceneObject wall_box(const std::string& category, WallSide side, double along_pos, const Vec3& ext,
                       double offset, double z_bottom) {
    SceneObject o;
    o.category = vocab_->index(category);
    const double inward = half_wall() + offset + ext[1] / 2;
    switch (side) {
      case WallSide::South: o.position = {along_pos, inward, 0}; o.size = {ext[0], ext[1], ext[2]}; break;
      case WallSide::North: o.position = {along_pos, depth_ - inward, 0}; o.size = {ext[0], ext[1], ext[2]}; break;
      case WallSide::West: o.position = {inward, along_pos, 0}; o.size = {ext[1], ext[0], ext[2]}; break;
      case WallSide::East: o.position = {width_ - inward, along_pos, 0}; o.size = {ext[1], ext[0], ext[2]}; break;
    }
    o.position[2] = z_bottom + ext[2] / 2;
    return o;
  }

  bool along_range(WallSide side, double along_extent, double along_pos) const {
    const double lo = half_wall() + along_extent / 2;
    const double hi = wall_length(side) - half_wall() - along_extent / 2;
    return along_pos >= lo && along_pos <= hi;
  }

  std::optional<double> random_along(WallSide side, double along_extent) {
    const double lo = half_wall() + along_extent / 2;
    const double hi = wall_length(side) - half_wall() - along_extent / 2;
    if (hi < lo) return std::nullopt;
    return uniform_real(rng_, lo, hi);
  }

  bool inside_room(const SceneObject& o) const {
    return o.min(0) >= half_wall() - 1e-9 && o.max(0) <= width_ - half_wall() + 1e-9 &&
           o.min(1) >= half_wall() - 1e-9 && o.max(1) <= depth_ - half_wall() + 1e-9;
  }

  // True when `o` fits inside the room and overlaps no furniture other than
  // `support` (the object it stands on, if any).
  bool fits(const SceneObject& o, const SceneObject* support = nullptr) const {
    if (!inside_room(o)) return false;
    for (const auto& other : objects_) {
      if (vocab_->is_structural(other.category)) continue;
      if (support && other.id == support->id) continue;
      if (boxes_overlap(o, other)) return false;
    }
    return true;
  }

  bool place(SceneObject o, const SceneObject* support = nullptr) {
    if (!fits(o, support)) return false;
    o.id = next_id(vocab_->name(o.category));
    objects_.push_back(std::move(o));
    return true;
  }

  WallSide random_side() { return static_cast<WallSide>(uniform_index(rng_, 4)); }

  bool apply(const rules::BedAgainstWall&, const Composition&, std::size_t&) {
    const Vec3 ext = noisy_extents("bed");
    bed_side_ = random_side();
    auto t = random_along(bed_side_, ext[0]);
    if (!t) return false;
    bed_along_ = *t;
    bed_extent_ = ext;
    has_bed_ = place(wall_box("bed", bed_side_, *t, ext, 0.0, 0.0));
    return has_bed_;
  }

  bool apply(const rules::NightstandsFlankBed& r, const Composition& comp, std::size_t&) {
    nightstands_.clear();
    if (!comp.nightstands) return true;
    if (!has_bed_) throw GenerationError("NightstandsFlankBed requires a preceding BedAgainstWall rule");
    for (int s : {-1, 1}) {
      const Vec3 ext = noisy_extents("nightstand");
      const double gap = uniform_real(rng_, r.min_gap, r.max_gap);
      const double t = bed_along_ + s * (bed_extent_[0] / 2 + gap + ext[0] / 2);
      if (!along_range(bed_side_, ext[0], t)) return false;
      if (!place(wall_box("nightstand", bed_side_, t, ext, 0.0, 0.0))) return false;
      nightstands_.push_back(objects_.size() - 1);
    }
    return true;
  }

  bool apply(const rules::LampOnNightstand& r, const Composition& comp, std::size_t&) {
    for (std::size_t k = 0; k < nightstands_.size(); ++k) {
      if (!comp.lamps[k]) continue;
      const SceneObject stand = objects_[nightstands_[k]];
      const Vec3 ext = noisy_extents("lamp");
      SceneObject lamp;
      lamp.category = vocab_->index("lamp");
      lamp.size = ext;  // lamps are rotationally symmetric; no wall alignment
      lamp.position = {stand.position[0] + uniform_real(rng_, -r.jitter, r.jitter),
                       stand.position[1] + uniform_real(rng_, -r.jitter, r.jitter), stand.top() + ext[2] / 2};
      if (!place(lamp, &stand)) return false;
    }
    return true;
  }

  bool apply(const rules::DeskWithChair& r, const Composition& comp, std::size_t&) {
    if (!comp.desk) return true;
    const Vec3 desk_ext = noisy_extents("desk");
    const WallSide side = random_side();
    auto t = random_along(side, desk_ext[0]);
    if (!t) return false;
    if (!place(wall_box("desk", side, *t, desk_ext, 0.0, 0.0))) return false;
    const Vec3 chair_ext = noisy_extents("chair");
    const double gap = uniform_real(rng_, r.min_gap, r.max_gap);
    const double chair_t = *t + uniform_real(rng_, -0.1, 0.1);
    return place(wall_box("chair", side, chair_t, chair_ext, desk_ext[1] + gap, 0.0));
  }

  bool apply(const rules::AgainstWall& r, const Composition& comp, std::size_t& index) {
    const bool present = comp.against_wall.at(index++);
    if (!present) return true;
    const Vec3 ext = noisy_extents(r.category);
    const WallSide side = random_side();
    auto t = random_along(side, ext[0]);
    if (!t) return false;
    return place(wall_box(r.category, side, *t, ext, 0.0, 0.0));
  }

  bool apply(const rules::TvFacingSofa& r, const Composition& comp, std::size_t&) {
    if (!comp.tv) return true;
    const Vec3 tv_ext = noisy_extents("tv");
    const WallSide side = random_side();
    auto t = random_along(side, tv_ext[0]);
    if (!t) return false;
    if (!place(wall_box("tv", side, *t, tv_ext, 0.0, r.mount_height))) return false;
    const Vec3 sofa_ext = noisy_extents("sofa");
    const WallSide other = opposite(side);
    const double sofa_t = *t + uniform_real(rng_, -r.jitter, r.jitter);
    if (!along_range(other, sofa_ext[0], sofa_t)) return false;
    return place(wall_box("sofa", other, sofa_t, sofa_ext, 0.0, 0.0));
  }

  bool apply(const rules::IsolatedTvSelectsTarget& r, const Composition& comp, std::size_t&) {
    // Both boxes are drawn regardless of whether the tv is kept, so the target
    // position distribution does not depend on the tv.
    Vec3 target_ext = noisy_extents(r.with_tv);
    if (uniform_index(rng_, 2) == 1) std::swap(target_ext[0], target_ext[1]);
    SceneObject target;
    target.category = vocab_->index(comp.long_range_tv ? r.with_tv : r.without_tv);
    target.size = target_ext;
    target.position = {uniform_real(rng_, half_wall() + target_ext[0] / 2, width_ - half_wall() - target_ext[0] / 2),
                       uniform_real(rng_, half_wall() + target_ext[1] / 2, depth_ - half_wall() - target_ext[1] / 2),
                       target_ext[2] / 2};

    const Vec3 tv_ext = noisy_extents("tv");
    SceneObject tv;
    tv.category = vocab_->index("tv");
    tv.size = tv_ext;
    tv.position = {uniform_real(rng_, 0.0, width_), uniform_real(rng_, 0.0, depth_), r.tv_bottom + tv_ext[2] / 2};

    if (std::abs(tv.position[0] - width_ / 2) <= 0.3 || std::abs(tv.position[1] - depth_ / 2) <= 0.3) return false;
    if (horizontal_gap(tv, target) <= r.isolation) return false;
    for (const auto& o : objects_) {
      if (o.category == vocab_->wall_index() && horizontal_gap(tv, o) <= r.isolation) return false;
    }
    if (!place(target)) return false;
    if (comp.long_range_tv && !place(tv)) return false;
    return true;
  }

  const GeneratorRules& rules_;
  std::shared_ptr<const CategoryVocab> vocab_;
  Rng& rng_;
  std::vector<SceneObject> objects_;
  std::map<std::string, int> counters_;
  double width_ = 0.0;
  double depth_ = 0.0;

  bool has_bed_ = false;
  WallSide bed_side_ = WallSide::South;
  double bed_along_ = 0.0;
  Vec3 bed_extent_{};
  std::vector<std::size_t> nightstands_;
};

bool draw(Rng& rng, double probability) { return uniform_real(rng, 0.0, 1.0) < probability; }

Composition draw_composition(const GeneratorRules& rules, Rng& rng) {
  Composition c;
  for (const PlacementRule& rule : rules.placement) {
    if (auto* r = std::get_if<rules::NightstandsFlankBed>(&rule)) c.nightstands = draw(rng, r->probability);
    if (auto* r = std::get_if<rules::LampOnNightstand>(&rule)) {
      c.lamps[0] = draw(rng, r->probability);
      c.lamps[1] = draw(rng, r->probability);
    }
    if (auto* r = std::get_if<rules::DeskWithChair>(&rule)) c.desk = draw(rng, r->probability);
    if (auto* r = std::get_if<rules::AgainstWall>(&rule)) c.against_wall.push_back(draw(rng, r->probability));
    if (auto* r = std::get_if<rules::TvFacingSofa>(&rule)) c.tv = draw(rng, r->probability);
    if (auto* r = std::get_if<rules::IsolatedTvSelectsTarget>(&rule)) c.long_range_tv = draw(rng, r->tv_probability);
  }
  return c;
}

}  // namespace

GeneratorRules bedroom_rules() {
  GeneratorRules r;
  r.room_type = "bedroom";
  r.categories = {"floor", "wall", "bed", "nightstand", "lamp", "wardrobe", "desk", "chair", "tv", "sofa"};
  r.extents = {
      {"bed", {1.6, 2.0, 0.5}},      {"nightstand", {0.5, 0.4, 0.5}}, {"lamp", {0.3, 0.3, 0.45}},
      {"wardrobe", {1.2, 0.6, 2.0}}, {"desk", {1.2, 0.6, 0.75}},      {"chair", {0.5, 0.5, 0.85}},
      {"tv", {1.2, 0.1, 0.7}},       {"sofa", {2.0, 0.9, 0.85}},
  };
  r.placement = {rules::BedAgainstWall{},     rules::NightstandsFlankBed{1.0}, rules::LampOnNightstand{0.8},
                 rules::DeskWithChair{0.5},   rules::AgainstWall{"wardrobe", 0.5},
                 rules::TvFacingSofa{0.5}};
  return r;
}

GeneratorRules long_range_rules() {
  GeneratorRules r;
  r.room_type = "long_range";
  r.categories = {"floor", "wall", "tv", "sofa", "desk"};
  r.extents = {{"tv", {1.0, 0.1, 0.6}}, {"sofa", {1.4, 0.8, 0.75}}, {"desk", {1.4, 0.8, 0.75}}};
  r.room_width = {4.5, 5.5};
  r.room_depth = {4.5, 5.5};
  r.placement = {rules::IsolatedTvSelectsTarget{}};
  return r;
}

GeneratorRules size_probe_rules() {
  GeneratorRules r;
  r.room_type = "size_probe";
  r.categories = {"floor", "wall", "bed", "nightstand", "lamp", "wardrobe", "desk", "chair"};
  r.extents = {
      {"bed", {1.6, 1.6, 0.5}},      {"nightstand", {0.45, 0.45, 0.55}}, {"lamp", {0.25, 0.25, 0.4}},
      {"wardrobe", {1.0, 1.0, 2.0}}, {"desk", {1.2, 1.2, 0.75}},         {"chair", {0.5, 0.5, 0.9}},
  };
  r.room_width = {4.5, 5.5};
  r.room_depth = {4.5, 5.5};
  r.placement = {rules::BedAgainstWall{},   rules::NightstandsFlankBed{1.0},      rules::LampOnNightstand{1.0},
                 rules::DeskWithChair{1.0}, rules::AgainstWall{"wardrobe", 1.0}};
  return r;
}

Scene generate_scene(const GeneratorRules& rules, Rng& rng) {
  if (rules.room_width[0] <= 0 || rules.room_width[1] < rules.room_width[0] || rules.room_depth[0] <= 0 ||
      rules.room_depth[1] < rules.room_depth[0]) {
    throw GenerationError("invalid room size range");
  }
  auto vocab = std::make_shared<const CategoryVocab>(rules.categories);
  const Composition comp = draw_composition(rules, rng);
  Builder builder(rules, vocab, rng);
  for (int attempt = 0; attempt < rules.max_attempts; ++attempt) {
    if (auto scene = builder.attempt(comp)) return std::move(*scene);
  }
  throw GenerationError("placement rules could not be satisfied after " + std::to_string(rules.max_attempts) +
                        " attempts");
}

std::vector<Scene> generate_scenes(const GeneratorRules& rules, std::size_t count, std::uint64_t seed) {
  std::vector<Scene> scenes;
  scenes.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(splitmix64(seed ^ splitmix64(i + 1)));
    scenes.push_back(generate_scene(rules, rng));
  }
  return scenes;
}

}  // namespace sgnet
