// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "sgnet/train.hpp"

namespace sgnet {

namespace {

constexpr std::size_t kEvalChunk = 8;

// Chunk boundaries are fixed multiples of kEvalChunk, so results do not
// depend on the thread count.
std::vector<PredictionResult> predict_all(const Model& model, const std::vector<Query>& queries, int threads) {
  std::vector<PredictionResult> out(queries.size());
  const std::size_t chunks = (queries.size() + kEvalChunk - 1) / kEvalChunk;
  const auto n = std::min(chunks, static_cast<std::size_t>(std::max(1, threads)));
  auto work = [&](std::size_t first) {
    std::vector<SceneGraph> graphs;
    for (std::size_t c = first; c < chunks; c += n) {
      const std::size_t s = c * kEvalChunk;
      const std::size_t e = std::min(queries.size(), s + kEvalChunk);
      graphs.clear();
      for (std::size_t i = s; i < e; ++i) graphs.push_back(queries[i].graph);
      auto res = predict_batch(model, graphs);
      std::move(res.begin(), res.end(), out.begin() + static_cast<std::ptrdiff_t>(s));
    }
  };
  if (n <= 1) {
    work(0);
    return out;
  }
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < n; ++t) pool.emplace_back(work, t);
  for (auto& th : pool) th.join();
  return out;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

int target_rank(std::span<const double> probs, int target) {
  if (target < 0 || static_cast<std::size_t>(target) >= probs.size()) {
    throw std::out_of_range("target category outside the distribution");
  }
  const double pt = probs[static_cast<std::size_t>(target)];
  int rank = 0;
  for (std::size_t c = 0; c < probs.size(); ++c) {
    const auto ci = static_cast<int>(c);
    if (probs[c] > pt || (probs[c] == pt && ci < target)) ++rank;
  }
  return rank;
}

double size_error_cm(std::span<const Vec3> predicted, std::span<const Vec3> truth) {
  if (predicted.empty()) throw std::invalid_argument("size error of an empty query set");
  if (predicted.size() != truth.size()) throw std::invalid_argument("prediction and truth counts differ");
  double total = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    double q = 0;
    for (std::size_t a = 0; a < 3; ++a) q += std::abs(predicted[i][a] - truth[i][a]);
    total += q / 3.0;
  }
  return 100.0 * total / static_cast<double>(predicted.size());
}

EvalReport evaluate_queries(const Model& model, const std::vector<Query>& queries, int threads) {
  if (queries.empty()) throw std::invalid_argument("empty test set");
  const auto preds = predict_all(model, queries, threads);

  EvalReport r;
  r.queries = queries.size();
  std::vector<Vec3> pred_size, true_size;
  struct RoomAcc {
    std::size_t n = 0, h1 = 0, h3 = 0, h5 = 0;
    std::vector<Vec3> p, t;
  };
  std::map<std::string, RoomAcc> rooms;
  std::map<std::size_t, std::pair<std::size_t, std::size_t>> counts;
  std::array<std::size_t, 10> hits{};
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const Query& q = queries[i];
    const int rank = target_rank(preds[i].probs, q.target);
    for (int k = 1; k <= 10; ++k) {
      if (rank < k) ++hits[static_cast<std::size_t>(k - 1)];
    }
    pred_size.push_back(preds[i].size);
    true_size.push_back(q.target_size);
    RoomAcc& ra = rooms[q.room_type];
    ++ra.n;
    ra.h1 += rank < 1;
    ra.h3 += rank < 3;
    ra.h5 += rank < 5;
    ra.p.push_back(preds[i].size);
    ra.t.push_back(q.target_size);
    auto& c = counts[q.object_count];
    ++c.first;
    c.second += rank < 1;
  }
  const auto n = static_cast<double>(queries.size());
  for (std::size_t k = 0; k < 10; ++k) r.topk[k] = static_cast<double>(hits[k]) / n;
  r.size_cm = size_error_cm(pred_size, true_size);
  for (auto& [room, a] : rooms) {
    const auto m = static_cast<double>(a.n);
    r.per_room[room] = {a.n, static_cast<double>(a.h1) / m, static_cast<double>(a.h3) / m,
                        static_cast<double>(a.h5) / m, size_error_cm(a.p, a.t)};
  }
  for (const auto& [objects, c] : counts) {
    r.by_object_count.push_back({objects, c.first, static_cast<double>(c.second) / static_cast<double>(c.first)});
  }
  return r;
}

EvalReport evaluate_topk(const Model& model, const std::vector<Scene>& scenes, std::uint64_t seed, int threads) {
  if (scenes.empty()) throw std::invalid_argument("empty test set");
  return evaluate_queries(model, make_queries(scenes, seed), threads);
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json j;
  j["queries"] = queries;
  j["top1"] = top(1);
  j["top3"] = top(3);
  j["top5"] = top(5);
  j["topk"] = topk;
  j["size_cm"] = size_cm;
  nlohmann::json rooms = nlohmann::json::object();
  for (const auto& [room, s] : per_room) {
    rooms[room] = {{"queries", s.queries}, {"top1", s.top1}, {"top3", s.top3}, {"top5", s.top5},
                   {"size_cm", s.size_cm}};
  }
  j["per_room"] = rooms;
  nlohmann::json bins = nlohmann::json::array();
  for (const auto& b : by_object_count) bins.push_back({{"objects", b.objects}, {"queries", b.queries}, {"top1", b.top1}});
  j["by_object_count"] = bins;
  return j;
}

std::string EvalReport::to_table() const {
  std::ostringstream os;
  os << "queries  " << queries << "\n";
  os << "K      ";
  for (int k = 1; k <= 10; ++k) os << (k < 10 ? "     " : "    ") << k;
  os << "\ntop-K  ";
  for (double v : topk) os << " " << fixed(v, 3);
  os << "\nsize error (cm)  " << fixed(size_cm, 2) << "\n";
  if (!per_room.empty()) {
    os << "\nroom              queries   top1   top3   top5  size_cm\n";
    for (const auto& [room, s] : per_room) {
      char line[160];
      std::snprintf(line, sizeof line, "%-16s %8zu %6.3f %6.3f %6.3f %8.2f\n", room.c_str(), s.queries, s.top1, s.top3,
                    s.top5, s.size_cm);
      os << line;
    }
  }
  if (!by_object_count.empty()) {
    os << "\nobjects  queries   top1\n";
    for (const auto& b : by_object_count) {
      char line[96];
      std::snprintf(line, sizeof line, "%7zu %8zu %6.3f\n", b.objects, b.queries, b.top1);
      os << line;
    }
  }
  return os.str();
}

}  // namespace sgnet
