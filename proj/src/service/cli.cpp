// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sgnet/dataset.hpp"
#include "sgnet/generator.hpp"
#include "sgnet/scene_json.hpp"
#include "sgnet/service.hpp"
#include "sgnet/synthesis.hpp"
#include "sgnet/train.hpp"

namespace sgnet {

namespace {

using nlohmann::json;

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

GeneratorRules rules_by_name(const std::string& name) {
  if (name == "bedroom") return bedroom_rules();
  if (name == "long-range") return long_range_rules();
  if (name == "size-probe") return size_probe_rules();
  throw Failure("unknown generator rules '" + name + "' (expected bedroom, long-range or size-probe)");
}

std::string checkpoint_path(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kCheckpointEnv); env && *env) return env;
  throw Failure(std::string("no checkpoint given: pass --checkpoint or set ") + kCheckpointEnv);
}

Model open_checkpoint(const std::string& path) {
  try {
    return load_checkpoint(path);
  } catch (const std::exception& e) {
    throw Failure("cannot load checkpoint '" + path + "': " + e.what());
  }
}

void require_vocab(const Model& m, const CategoryVocab& v, const std::string& what) {
  if (v.hash() != m.vocab_hash) {
    throw Failure(what + " uses vocabulary " + v.hash_hex() + " but the checkpoint was trained on another one");
  }
}

std::vector<Scene> load_data(const std::string& dir) {
  std::vector<Scene> scenes = load_scene_dir(dir);
  if (scenes.empty()) throw Failure("no scenes found in '" + dir + "'");
  for (const Scene& s : scenes) {
    if (!(s.vocab() == scenes.front().vocab())) throw Failure("scenes in '" + dir + "' mix vocabularies");
  }
  return scenes;
}

Vec3 parse_point(const std::string& text) {
  Vec3 p{};
  std::stringstream ss(text);
  std::string part;
  std::size_t n = 0;
  while (std::getline(ss, part, ',')) {
    if (n == 3) throw CLI::ValidationError("--query", "expected x,y,z");
    std::size_t used = 0;
    try {
      p[n] = std::stod(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != part.size() || part.empty()) throw CLI::ValidationError("--query", "'" + part + "' is not a number");
    ++n;
  }
  if (n != 3) throw CLI::ValidationError("--query", "expected x,y,z");
  return p;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Failure("cannot write '" + path + "'");
  f << text;
  if (!f) throw Failure("write to '" + path + "' failed");
}

json prediction_json(const CategoryVocab& v, const PredictionResult& r) {
  return {{"categories", v.names()}, {"probs", r.probs}, {"size", r.size}};
}

struct TrainFlags {
  std::string variant = "full";
  int iterations = 10000;
  std::size_t batch = 350;
  std::size_t micro = 4;
  double lr = 1e-3;
  double weight_decay = 1e-5;
  double size_weight = 1.0;
  int t = 3;
  int node_dim = 100;
  int hidden = 300;
  int eval_every = 100;
  int patience = 10;
  int threads = 1;

  void attach(CLI::App* app) {
    app->add_option("--iterations", iterations, "Maximum optimizer steps")->capture_default_str();
    app->add_option("--batch", batch, "Scenes per step")->capture_default_str();
    app->add_option("--micro-batch", micro, "Graphs per forward pass")->capture_default_str();
    app->add_option("--lr", lr, "Adam learning rate")->capture_default_str();
    app->add_option("--weight-decay", weight_decay)->capture_default_str();
    app->add_option("--size-weight", size_weight, "Weight of the size loss")->capture_default_str();
    app->add_option("--T", t, "Message-passing iterations")->capture_default_str();
    app->add_option("--node-dim", node_dim)->capture_default_str();
    app->add_option("--hidden", hidden)->capture_default_str();
    app->add_option("--eval-every", eval_every)->capture_default_str();
    app->add_option("--patience", patience)->capture_default_str();
    app->add_option("--threads", threads, "Evaluation threads")->capture_default_str();
  }
  ModelConfig model(int categories) const {
    ModelConfig c;
    c.categories = categories;
    c.node_dim = node_dim;
    c.hidden = hidden;
    c.iterations = t;
    c.variant = variant_from_name(variant);
    return c;
  }
  TrainConfig train(std::uint64_t seed) const {
    TrainConfig c;
    c.batch_size = batch;
    c.micro_batch = micro;
    c.max_iterations = iterations;
    c.seed = seed;
    c.size_weight = size_weight;
    c.adam.lr = lr;
    c.adam.weight_decay = weight_decay;
    c.eval_every = eval_every;
    c.patience = patience;
    c.eval_threads = threads;
    return c;
  }
};

std::vector<int> parse_topk(const std::string& text, int categories) {
  std::vector<int> ks;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    int k = 0;
    try {
      k = std::stoi(part);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--topk", "'" + part + "' is not an integer");
    }
    if (k < 1 || k > 10 || k > categories) throw CLI::ValidationError("--topk", "K must lie in [1, min(10, C)]");
    ks.push_back(k);
  }
  if (ks.empty()) throw CLI::ValidationError("--topk", "no K given");
  return ks;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Scene graph context prediction: data generation, training, evaluation and synthesis", "sgnet"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 1;
  app.add_option("--seed", seed, "Random seed")->capture_default_str();

  std::string checkpoint, data, out_path, scene_path, variant_list, topk = "1,3,5", format = "json";
  std::string rules = "bedroom", query, object_id, posteriors, surface = kFloorSurface, heatmap_path, host = "127.0.0.1";
  std::size_t count = 0;
  double resolution = 0, threshold = -1;
  int max_steps = 10, threads = 1, port = 8080;
  bool all_scenes = false;
  TrainFlags tf;

  auto* gen = app.add_subcommand("gen-data", "Generate synthetic scenes");
  gen->add_option("--rules", rules, "bedroom, long-range or size-probe")->capture_default_str();
  gen->add_option("--count", count, "Number of scenes")->required();
  gen->add_option("--out", out_path, "Output directory")->required();

  auto* train = app.add_subcommand("train", "Train a model on a scene directory");
  train->add_option("--data", data, "Scene directory")->required();
  train->add_option("--out", out_path, "Checkpoint to write")->required();
  train->add_option("--variant", tf.variant, "Model variant")->capture_default_str();
  tf.attach(train);

  auto* eval = app.add_subcommand("eval", "Top-K accuracy and size error");
  eval->add_option("--checkpoint", checkpoint, "Checkpoint (default $SGNET_CHECKPOINT)");
  eval->add_option("--data", data, "Scene directory")->required();
  eval->add_option("--topk", topk, "Comma-separated K values")->capture_default_str();
  eval->add_flag("--all", all_scenes, "Evaluate every scene instead of the test split");
  eval->add_option("--threads", threads)->capture_default_str();
  eval->add_option("--format", format, "json or table")->check(CLI::IsMember({"json", "table"}))->capture_default_str();

  auto* ablate = app.add_subcommand("ablate", "Train and evaluate model variants");
  ablate->add_option("--data", data, "Scene directory")->required();
  ablate->add_option("--variants", variant_list, "Comma-separated variants (default: all)");
  ablate->add_option("--out", out_path, "Also write the table here");
  tf.attach(ablate);

  auto* pred = app.add_subcommand("predict", "Category distribution and size at a query point");
  pred->add_option("--checkpoint", checkpoint, "Checkpoint (default $SGNET_CHECKPOINT)");
  pred->add_option("--scene", scene_path, "Scene file")->required();
  auto* query_opt = pred->add_option("--query", query, "x,y,z");
  auto* object_opt = pred->add_option("--object", object_id, "Recognize this object from its context");
  pred->add_option("--posteriors", posteriors, "External posteriors to fuse (with --object)")->needs(object_opt);
  query_opt->excludes(object_opt);

  auto* synth = app.add_subcommand("synth", "Iterative greedy synthesis");
  synth->add_option("--checkpoint", checkpoint, "Checkpoint (default $SGNET_CHECKPOINT)");
  synth->add_option("--scene", scene_path, "Starting scene")->required();
  synth->add_option("--surface", surface, "floor or a supporting object id")->capture_default_str();
  synth->add_option("--resolution", resolution, "Cells per meter (default 4 on the floor, 10 on objects)");
  synth->add_option("--threshold", threshold, "Stop below this score (default 2/C)");
  synth->add_option("--max-steps", max_steps)->capture_default_str();
  synth->add_option("--threads", threads)->capture_default_str();
  synth->add_option("--out", out_path, "Write the final scene here");
  synth->add_option("--heatmap", heatmap_path, "Write the first step's grid here");

  auto* srv = app.add_subcommand("serve", "HTTP service");
  srv->add_option("--checkpoint", checkpoint, "Checkpoint (default $SGNET_CHECKPOINT)");
  srv->add_option("--host", host)->capture_default_str();
  srv->add_option("--port", port)->capture_default_str();
  srv->add_option("--threads", threads, "Threads per grid evaluation")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) {
      const auto scenes = generate_scenes(rules_by_name(rules), count, seed);
      save_scene_dir(scenes, out_path);
      out << json{{"scenes", scenes.size()}, {"out", out_path}, {"seed", seed}}.dump() << '\n';
    } else if (train->parsed()) {
      const auto scenes = load_data(data);
      const DatasetSplit split = split_dataset(scenes.size(), seed);
      const ModelConfig mc = tf.model(scenes.front().vocab().size());
      const TrainConfig tc = tf.train(seed);
      const TrainResult r = train_model(make_model(mc, scenes.front().vocab().hash(), seed),
                                        select(scenes, split.train), select(scenes, split.val), tc,
                                        [&](const TrainProgress& p) {
                                          json line{{"iteration", p.iteration}, {"loss", p.loss}};
                                          if (p.val_top1) line["val_top1"] = *p.val_top1;
                                          err << line.dump() << '\n';
                                        });
      save_checkpoint(r.model, out_path);
      out << json{{"checkpoint", out_path},
                  {"iterations", r.iterations},
                  {"best_iteration", r.best_iteration},
                  {"best_val_top1", r.best_val_top1},
                  {"early_stopped", r.early_stopped}}
                 .dump()
          << '\n';
    } else if (eval->parsed()) {
      const std::string path = checkpoint_path(checkpoint);
      const Model m = open_checkpoint(path);
      const auto scenes = load_data(data);
      require_vocab(m, scenes.front().vocab(), "data in '" + data + "'");
      const auto ks = parse_topk(topk, m.config.categories);
      const auto test = all_scenes ? scenes : select(scenes, split_dataset(scenes.size(), seed).test);
      const EvalReport rep = evaluate_topk(m, test, seed, threads);
      if (format == "table") {
        out << rep.to_table();
      } else {
        json j = rep.to_json();
        for (int k : ks) j["top" + std::to_string(k)] = rep.top(k);
        out << j.dump(2) << '\n';
      }
    } else if (ablate->parsed()) {
      const auto scenes = load_data(data);
      const DatasetSplit split = split_dataset(scenes.size(), seed);
      std::vector<Variant> variants(kAllVariants.begin(), kAllVariants.end());
      if (!variant_list.empty()) {
        variants.clear();
        std::stringstream ss(variant_list);
        std::string v;
        while (std::getline(ss, v, ',')) variants.push_back(variant_from_name(v));
      }
      const auto rows = run_ablation(select(scenes, split.train), select(scenes, split.val),
                                     select(scenes, split.test), variants, tf.model(scenes.front().vocab().size()),
                                     tf.train(seed), seed);
      const std::string text = ablation_to_json(rows).dump(2) + "\n";
      if (!out_path.empty()) write_file(out_path, text);
      out << text;
    } else if (pred->parsed()) {
      const std::optional<Vec3> point = query.empty() ? std::nullopt : std::optional<Vec3>(parse_point(query));
      if (!point && object_id.empty()) throw CLI::RequiredError("--query or --object");
      const std::string path = checkpoint_path(checkpoint);
      const Model m = open_checkpoint(path);
      const Scene scene = load_scene(scene_path);
      require_vocab(m, scene.vocab(), "scene '" + scene_path + "'");
      if (!object_id.empty()) {
        const auto idx = scene.find(object_id);
        if (!idx) throw Failure("scene has no object '" + object_id + "'");
        const TrainingSample s = make_training_sample_at(scene, *idx);
        const PredictionResult r = predict_at(m, s.scene, s.query);
        json j = prediction_json(scene.vocab(), r);
        j["object"] = object_id;
        if (!posteriors.empty()) {
          const auto ext = load_posteriors(posteriors, static_cast<std::size_t>(m.config.categories));
          const auto it = ext.find(object_id);
          if (it == ext.end()) throw Failure("no posterior for '" + object_id + "' in '" + posteriors + "'");
          j["external"] = it->second;
          j["fused"] = fuse_posteriors(r.probs, it->second);
        }
        out << j.dump() << '\n';
      } else {
        const PredictionResult r = predict_at(m, scene, *point);
        out << prediction_json(scene.vocab(), r).dump() << '\n';
      }
    } else if (synth->parsed()) {
      const std::string path = checkpoint_path(checkpoint);
      const Model m = open_checkpoint(path);
      const Scene scene = load_scene(scene_path);
      require_vocab(m, scene.vocab(), "scene '" + scene_path + "'");
      GridSpec spec;
      spec.surface = surface;
      spec.threads = threads;
      if (resolution > 0) spec.resolution = resolution;
      if (threshold >= 0) spec.stop_threshold = threshold;
      if (!heatmap_path.empty()) {
        const double res = spec.resolution.value_or(default_resolution(surface));
        write_file(heatmap_path, eval_grid(scene, m, surface, res, threads).to_json().dump() + "\n");
      }
      const SynthesisRun run = synthesize(scene, m, spec, max_steps, &out);
      if (!out_path.empty()) save_scene(run.scene, out_path);
    } else if (srv->parsed()) {
      const std::string path = checkpoint_path(checkpoint);
      const Service service(open_checkpoint(path), path, ServiceOptions{threads});
      serve(service, host, port, [&](int bound, std::function<void()>) {
        err << "listening on http://" << host << ":" << bound << '\n';
      });
    }
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace sgnet
