// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
#include <cmath>
#include <cstdio>

#include "sgnet/scene_json.hpp"
#include "sgnet/service.hpp"
#include "sgnet/synthesis.hpp"

// After Eigen: <resolv.h> defines a _res macro that clashes with Eigen internals.
#include <httplib.h>

namespace sgnet {

namespace {

using nlohmann::json;

// Request failure carrying its HTTP status.
struct HttpError {
  int status;
  std::string message;
};

HttpResponse reply(int status, const json& body) { return {status, body.dump()}; }

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json parse_body(const std::string& body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw HttpError{400, std::string("malformed JSON: ") + e.what()};
  }
  if (!doc.is_object()) throw HttpError{400, "request body must be a JSON object"};
  return doc;
}

Scene request_scene(const json& doc, const Model& model) {
  const auto it = doc.find("scene");
  if (it == doc.end()) throw HttpError{400, "missing field 'scene'"};
  std::optional<Scene> scene;
  try {
    scene.emplace(scene_from_json(*it));
  } catch (const SceneError& e) {
    throw HttpError{400, std::string("invalid scene: ") + e.what()};
  }
  if (scene->vocab().hash() != model.vocab_hash) {
    throw HttpError{409, "scene vocabulary " + scene->vocab().hash_hex() + " does not match the checkpoint (" +
                             hex64(model.vocab_hash) + ")"};
  }
  return std::move(*scene);
}

double finite_number(const json& v, const char* what) {
  if (!v.is_number()) throw HttpError{400, std::string("'") + what + "' must be a number"};
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw HttpError{400, std::string("'") + what + "' must be finite"};
  return d;
}

GridSpec request_grid(const json& doc, int threads) {
  GridSpec spec;
  spec.threads = threads;
  if (auto it = doc.find("surface"); it != doc.end()) {
    if (!it->is_string()) throw HttpError{400, "'surface' must be a string"};
    spec.surface = it->get<std::string>();
  }
  if (auto it = doc.find("resolution"); it != doc.end() && !it->is_null()) {
    const double r = finite_number(*it, "resolution");
    if (!(r > 0)) throw HttpError{400, "'resolution' must be positive"};
    spec.resolution = r;
  }
  if (auto it = doc.find("stop_threshold"); it != doc.end() && !it->is_null()) {
    spec.stop_threshold = finite_number(*it, "stop_threshold");
  }
  return spec;
}

template <typename Fn>
HttpResponse guarded(Fn&& fn, std::atomic<std::uint64_t>& failures) {
  try {
    return fn();
  } catch (const HttpError& e) {
    ++failures;
    return reply(e.status, {{"error", e.message}});
  } catch (const UnknownSurface& e) {
    ++failures;
    return reply(404, {{"error", e.what()}});
  } catch (const EmptyFootprint& e) {
    ++failures;
    return reply(422, {{"error", e.what()}});
  } catch (const NoAdmissibleCell& e) {
    ++failures;
    return reply(422, {{"error", e.what()}});
  } catch (const std::out_of_range& e) {
    ++failures;
    return reply(422, {{"error", e.what()}});
  } catch (const std::invalid_argument& e) {
    ++failures;
    return reply(400, {{"error", e.what()}});
  } catch (const std::exception& e) {
    ++failures;
    return reply(500, {{"error", e.what()}});
  }
}

}  // namespace

Service::Service(Model model, std::string checkpoint_path, ServiceOptions options)
    : model_(std::move(model)), checkpoint_path_(std::move(checkpoint_path)), options_(options) {
  model_.config.validate();
  if (options_.grid_threads < 1) throw std::invalid_argument("grid_threads must be at least 1");
}

HttpResponse Service::handle(const std::string& method, const std::string& path, const std::string& body) const {
  struct Route {
    const char* path;
    const char* method;
    HttpResponse (Service::*post)(const std::string&) const;
  };
  static const Route routes[] = {
      {"/v1/predict", "POST", &Service::predict},
      {"/v1/synthesize/step", "POST", &Service::synthesize_step},
      {"/v1/heatmap", "POST", &Service::heatmap},
  };
  if (path == "/v1/health") {
    if (method != "GET") return reply(405, {{"error", "use GET"}});
    return health();
  }
  for (const Route& r : routes) {
    if (path != r.path) continue;
    if (method != r.method) return reply(405, {{"error", std::string("use ") + r.method}});
    return (this->*r.post)(body);
  }
  return reply(404, {{"error", "no route " + path}});
}

HttpResponse Service::health() const {
  ++requests_;
  const ModelConfig& c = model_.config;
  json j{{"status", "ok"},
         {"checkpoint", checkpoint_path_},
         {"variant", std::string(variant_name(c.variant))},
         {"categories", c.categories},
         {"node_dim", c.node_dim},
         {"hidden", c.hidden},
         {"iterations", c.iterations},
         {"vocab_hash", hex64(model_.vocab_hash)},
         {"parameters", model_.params.scalar_count()},
         {"checksum", hex64(model_.params.checksum())},
         {"requests", requests_.load()},
         {"failures", failures_.load()}};
  return reply(200, j);
}

HttpResponse Service::predict(const std::string& body) const {
  ++requests_;
  return guarded(
      [&] {
        const json doc = parse_body(body);
        const Scene scene = request_scene(doc, model_);
        const auto q = doc.find("query");
        if (q == doc.end() || !q->is_array() || q->size() != 3) {
          throw HttpError{400, "'query' must be an array [x, y, z]"};
        }
        const Vec3 p{finite_number((*q)[0], "query[0]"), finite_number((*q)[1], "query[1]"),
                     finite_number((*q)[2], "query[2]")};
        if (!scene.bounds().contains_xy(p[0], p[1])) throw HttpError{422, "query lies outside the scene bounds"};
        const PredictionResult r = predict_at(model_, scene, p);
        return reply(200, {{"categories", scene.vocab().names()}, {"probs", r.probs}, {"size", r.size}});
      },
      failures_);
}

HttpResponse Service::synthesize_step(const std::string& body) const {
  ++requests_;
  return guarded(
      [&] {
        const json doc = parse_body(body);
        const Scene scene = request_scene(doc, model_);
        const SynthesisOutcome o = synth_step(scene, model_, request_grid(doc, options_.grid_threads));
        json j = o.step.to_json(scene.vocab());
        j["scene"] = scene_to_json(o.scene);
        return reply(200, j);
      },
      failures_);
}

HttpResponse Service::heatmap(const std::string& body) const {
  ++requests_;
  return guarded(
      [&] {
        const json doc = parse_body(body);
        const Scene scene = request_scene(doc, model_);
        const GridSpec spec = request_grid(doc, options_.grid_threads);
        const double res = spec.resolution.value_or(default_resolution(spec.surface));
        return reply(200, eval_grid(scene, model_, spec.surface, res, spec.threads).to_json());
      },
      failures_);
}

void serve(const Service& service, const std::string& host, int port,
           const std::function<void(int, std::function<void()>)>& on_listen) {
  httplib::Server svr;
  auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
    const HttpResponse r = service.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  // The UI may be served from another origin.
  svr.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Headers", "Content-Type"},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  svr.Get("/v1/health", forward);
  svr.Post("/v1/predict", forward);
  svr.Post("/v1/synthesize/step", forward);
  svr.Post("/v1/heatmap", forward);
  svr.Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  svr.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (res.body.empty()) {
      res.set_content(json{{"error", "no route " + req.path}}.dump(), "application/json");
    }
  });

  const int bound = port == 0 ? svr.bind_to_any_port(host) : (svr.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port));
  if (on_listen) on_listen(bound, [&svr] { svr.stop(); });
  svr.listen_after_bind();
}

}  // namespace sgnet
