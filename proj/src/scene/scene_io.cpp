// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "sgnet/scene_json.hpp"

namespace sgnet {
namespace {

using nlohmann::json;

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw SceneError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SceneError(path.empty() ? key : path + "." + key, "missing field");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw SceneError(path, "expected a number");
  return v.get<double>();
}

std::string string(const json& v, const std::string& path) {
  if (!v.is_string()) throw SceneError(path, "expected a string");
  return v.get<std::string>();
}

Vec3 vec3(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) throw SceneError(path, "expected an array of three numbers");
  Vec3 out{};
  for (std::size_t a = 0; a < 3; ++a) out[a] = number(v[a], path + "[" + std::to_string(a) + "]");
  return out;
}

std::array<double, 2> range(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) throw SceneError(path, "expected [min, max]");
  return {number(v[0], path + "[0]"), number(v[1], path + "[1]")};
}

std::string format_double(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("cannot serialize a non-finite number");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  std::string s(buf);
  if (s == "-0") s = "0";
  return s;
}

void dump(const json& v, std::string& out) {
  switch (v.type()) {
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {  // std::map order: sorted keys
        if (!first) out += ',';
        first = false;
        out += json(it.key()).dump();
        out += ':';
        dump(it.value(), out);
      }
      out += '}';
      break;
    }
    case json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        dump(v[i], out);
      }
      out += ']';
      break;
    }
    case json::value_t::number_float:
      out += format_double(v.get<double>());
      break;
    default:
      out += v.dump();
  }
}

}  // namespace

double round_sig9(double v) {
  if (!std::isfinite(v)) return v;
  return std::strtod(format_double(v).c_str(), nullptr);
}

std::string canonical_dump(const json& doc) {
  std::string out;
  dump(doc, out);
  return out;
}

Scene scene_from_json(const json& doc) {
  if (!doc.is_object()) throw SceneError("", "scene document must be a JSON object");
  const std::string format = string(require(doc, "format", ""), "format");
  if (format != kSceneFormat) throw SceneError("format", "unsupported format '" + format + "'");
  std::string room_type = string(require(doc, "room_type", ""), "room_type");

  const json& vocab_doc = require(doc, "vocab", "");
  const json& names_doc = require(vocab_doc, "names", "vocab");
  if (!names_doc.is_array()) throw SceneError("vocab.names", "expected an array of strings");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < names_doc.size(); ++i) {
    names.push_back(string(names_doc[i], "vocab.names[" + std::to_string(i) + "]"));
  }
  auto vocab = std::make_shared<const CategoryVocab>(std::move(names));

  const json& bounds_doc = require(doc, "bounds", "");
  Bounds bounds{range(require(bounds_doc, "x", "bounds"), "bounds.x"),
                range(require(bounds_doc, "y", "bounds"), "bounds.y")};

  const json& objects_doc = require(doc, "objects", "");
  if (!objects_doc.is_array()) throw SceneError("objects", "expected an array");
  std::vector<SceneObject> objects;
  for (std::size_t i = 0; i < objects_doc.size(); ++i) {
    const std::string p = "objects[" + std::to_string(i) + "]";
    const json& o = objects_doc[i];
    SceneObject obj;
    obj.id = string(require(o, "id", p), p + ".id");
    const std::string category = string(require(o, "category", p), p + ".category");
    auto idx = vocab->find(category);
    if (!idx) throw SceneError(p + ".category", "category '" + category + "' is not in the vocabulary");
    obj.category = *idx;
    obj.position = vec3(require(o, "position", p), p + ".position");
    obj.size = vec3(require(o, "size", p), p + ".size");
    objects.push_back(std::move(obj));
  }
  return Scene(std::move(room_type), std::move(vocab), bounds, std::move(objects));
}

json scene_to_json(const Scene& scene) {
  std::vector<const SceneObject*> sorted;
  for (const auto& o : scene.objects()) sorted.push_back(&o);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->id < b->id; });

  json objects = json::array();
  for (const SceneObject* o : sorted) {
    objects.push_back({{"id", o->id},
                       {"category", scene.vocab().name(o->category)},
                       {"position", {o->position[0], o->position[1], o->position[2]}},
                       {"size", {o->size[0], o->size[1], o->size[2]}}});
  }
  const Bounds& b = scene.bounds();
  return {{"format", kSceneFormat},
          {"room_type", scene.room_type()},
          {"vocab", {{"names", scene.vocab().names()}}},
          {"bounds", {{"x", {b.x[0], b.x[1]}}, {"y", {b.y[0], b.y[1]}}}},
          {"objects", std::move(objects)}};
}

Scene parse_scene(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SceneError("", std::string("parse failure: ") + e.what());
  }
  return scene_from_json(doc);
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SceneError("", "cannot open scene file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_scene(ss.str());
  } catch (const SceneError& e) {
    throw SceneError(e.path(), e.detail() + " (in " + path + ")");
  }
}

std::string scene_to_canonical_json(const Scene& scene) {
  return canonical_dump(scene_to_json(scene));
}

void save_scene(const Scene& scene, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write scene file '" + path + "'");
  out << scene_to_canonical_json(scene) << '\n';
}

}  // namespace sgnet
