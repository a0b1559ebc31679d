// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sgnet/autodiff.hpp"

namespace sgnet::ad {

namespace {

std::atomic<std::size_t> g_ce_clamps{0};
constexpr double kProbFloor = 1e-12;

Tape& tape_of(Var a) {
  if (!a.valid()) throw std::invalid_argument("op on an empty Var");
  return *a.tape();
}

void same_tape(Var a, Var b) {
  if (a.tape() != b.tape()) throw std::invalid_argument("operands live on different tapes");
}

void require(bool ok, const char* op, const std::string& what) {
  if (!ok) throw std::invalid_argument(std::string(op) + ": " + what);
}

bool needs(Var v) { return v.valid() && v.tape()->needs_grad(v.id()); }

std::string dims(Var v) { return std::to_string(v.rows()) + "x" + std::to_string(v.cols()); }

template <typename F, typename D>
Var unary(Var x, F f, D dfdy) {
  Tape& t = tape_of(x);
  Matrix y = x.value().unaryExpr(f);
  const int xi = x.id();
  return t.record(std::move(y), needs(x), [xi, dfdy](Tape& tp, int self) {
    auto y = tp.value(self);
    auto g = tp.grad(self);
    tp.grad(xi).array() += g.array() * y.unaryExpr(dfdy).array();
  });
}

}  // namespace

std::size_t cross_entropy_clamp_count() { return g_ce_clamps.load(); }

Var affine(Var x, Var w, Var b) {
  Tape& t = tape_of(x);
  same_tape(x, w);
  require(x.cols() == w.cols(), "affine", "input " + dims(x) + " vs weight " + dims(w));
  Matrix y = x.value() * w.value().transpose();
  if (b.valid()) {
    same_tape(x, b);
    require(b.rows() == 1 && b.cols() == w.rows(), "affine", "bias " + dims(b));
    y.rowwise() += b.value().row(0);
  }
  const int xi = x.id(), wi = w.id(), bi = b.valid() ? b.id() : -1;
  return t.record(std::move(y), needs(x) || needs(w) || needs(b), [xi, wi, bi](Tape& tp, int self) {
    auto g = tp.grad(self);
    if (tp.needs_grad(xi)) tp.grad(xi).noalias() += g * tp.value(wi);
    if (tp.needs_grad(wi)) tp.grad(wi).noalias() += g.transpose() * tp.value(xi);
    if (bi >= 0 && tp.needs_grad(bi)) tp.grad(bi).row(0) += g.colwise().sum();
  });
}

Var pair_affine(Var h, Var w, Var b, std::span<const int> src, std::span<const int> dst) {
  Tape& t = tape_of(h);
  same_tape(h, w);
  const Index k = h.cols();
  require(w.cols() == 2 * k, "pair_affine", "weight " + dims(w) + " for node width " + std::to_string(k));
  require(src.size() == dst.size(), "pair_affine", "source and target lists differ in length");
  const Index n = h.rows();
  for (std::size_t e = 0; e < src.size(); ++e) {
    require(src[e] >= 0 && src[e] < n && dst[e] >= 0 && dst[e] < n, "pair_affine", "row index out of range");
  }
  auto hv = h.value();
  auto wv = w.value();
  const Matrix a = hv * wv.leftCols(k).transpose();
  const Matrix c = hv * wv.rightCols(k).transpose();
  Matrix y(static_cast<Index>(src.size()), w.rows());
  for (std::size_t e = 0; e < src.size(); ++e) {
    y.row(static_cast<Index>(e)) = a.row(src[e]) + c.row(dst[e]);
  }
  if (b.valid()) {
    same_tape(h, b);
    require(b.rows() == 1 && b.cols() == w.rows(), "pair_affine", "bias " + dims(b));
    y.rowwise() += b.value().row(0);
  }
  const int hi = h.id(), wi = w.id(), bi = b.valid() ? b.id() : -1;
  std::vector<int> s(src.begin(), src.end()), d(dst.begin(), dst.end());
  return t.record(std::move(y), needs(h) || needs(w) || needs(b),
                  [hi, wi, bi, k, n, s = std::move(s), d = std::move(d)](Tape& tp, int self) {
                    auto g = tp.grad(self);
                    Matrix ga = Matrix::Zero(n, g.cols());
                    Matrix gc = Matrix::Zero(n, g.cols());
                    for (std::size_t e = 0; e < s.size(); ++e) {
                      ga.row(s[e]) += g.row(static_cast<Index>(e));
                      gc.row(d[e]) += g.row(static_cast<Index>(e));
                    }
                    auto wv = tp.value(wi);
                    if (tp.needs_grad(hi)) {
                      auto gh = tp.grad(hi);
                      gh.noalias() += ga * wv.leftCols(k);
                      gh.noalias() += gc * wv.rightCols(k);
                    }
                    if (tp.needs_grad(wi)) {
                      auto hv = tp.value(hi);
                      auto gw = tp.grad(wi);
                      gw.leftCols(k).noalias() += ga.transpose() * hv;
                      gw.rightCols(k).noalias() += gc.transpose() * hv;
                    }
                    if (bi >= 0 && tp.needs_grad(bi)) tp.grad(bi).row(0) += g.colwise().sum();
                  });
}

Var relu(Var x) {
  return unary(
      x, [](double v) { return v > 0.0 ? v : 0.0; }, [](double y) { return y > 0.0 ? 1.0 : 0.0; });
}

Var sigmoid(Var x) {
  return unary(
      x, [](double v) { return 1.0 / (1.0 + std::exp(-v)); }, [](double y) { return y * (1.0 - y); });
}

Var tanh(Var x) {
  return unary(
      x, [](double v) { return std::tanh(v); }, [](double y) { return 1.0 - y * y; });
}

Var add(Var a, Var b) {
  Tape& t = tape_of(a);
  same_tape(a, b);
  require(a.rows() == b.rows() && a.cols() == b.cols(), "add", dims(a) + " vs " + dims(b));
  Matrix y = a.value() + b.value();
  const int ai = a.id(), bi = b.id();
  return t.record(std::move(y), needs(a) || needs(b), [ai, bi](Tape& tp, int self) {
    auto g = tp.grad(self);
    if (tp.needs_grad(ai)) tp.grad(ai) += g;
    if (tp.needs_grad(bi)) tp.grad(bi) += g;
  });
}

Var sub(Var a, Var b) {
  Tape& t = tape_of(a);
  same_tape(a, b);
  require(a.rows() == b.rows() && a.cols() == b.cols(), "sub", dims(a) + " vs " + dims(b));
  Matrix y = a.value() - b.value();
  const int ai = a.id(), bi = b.id();
  return t.record(std::move(y), needs(a) || needs(b), [ai, bi](Tape& tp, int self) {
    auto g = tp.grad(self);
    if (tp.needs_grad(ai)) tp.grad(ai) += g;
    if (tp.needs_grad(bi)) tp.grad(bi) -= g;
  });
}

Var mul(Var a, Var b) {
  Tape& t = tape_of(a);
  same_tape(a, b);
  require(a.rows() == b.rows() && a.cols() == b.cols(), "mul", dims(a) + " vs " + dims(b));
  Matrix y = a.value().cwiseProduct(b.value());
  const int ai = a.id(), bi = b.id();
  return t.record(std::move(y), needs(a) || needs(b), [ai, bi](Tape& tp, int self) {
    auto g = tp.grad(self);
    if (tp.needs_grad(ai)) tp.grad(ai) += g.cwiseProduct(tp.value(bi));
    if (tp.needs_grad(bi)) tp.grad(bi) += g.cwiseProduct(tp.value(ai));
  });
}

Var scale(Var a, double s) {
  Tape& t = tape_of(a);
  Matrix y = a.value() * s;
  const int ai = a.id();
  return t.record(std::move(y), needs(a), [ai, s](Tape& tp, int self) { tp.grad(ai) += tp.grad(self) * s; });
}

Var concat_cols(std::span<const Var> parts) {
  require(!parts.empty(), "concat_cols", "no inputs");
  Tape& t = tape_of(parts[0]);
  const Index rows = parts[0].rows();
  Index cols = 0;
  bool any = false;
  for (const Var& p : parts) {
    same_tape(parts[0], p);
    require(p.rows() == rows, "concat_cols", "row counts differ");
    cols += p.cols();
    any = any || needs(p);
  }
  Matrix y(rows, cols);
  std::vector<std::pair<int, Index>> pieces;
  Index at = 0;
  for (const Var& p : parts) {
    y.middleCols(at, p.cols()) = p.value();
    pieces.emplace_back(p.id(), at);
    at += p.cols();
  }
  return t.record(std::move(y), any, [pieces = std::move(pieces)](Tape& tp, int self) {
    auto g = tp.grad(self);
    for (auto [id, off] : pieces) {
      if (!tp.needs_grad(id)) continue;
      auto gi = tp.grad(id);
      gi += g.middleCols(off, gi.cols());
    }
  });
}

Var gather_rows(Var a, std::span<const int> rows) {
  Tape& t = tape_of(a);
  const Index n = a.rows();
  Matrix y(static_cast<Index>(rows.size()), a.cols());
  auto av = a.value();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i] >= 0 && rows[i] < n, "gather_rows", "row index out of range");
    y.row(static_cast<Index>(i)) = av.row(rows[i]);
  }
  const int ai = a.id();
  std::vector<int> r(rows.begin(), rows.end());
  return t.record(std::move(y), needs(a), [ai, r = std::move(r)](Tape& tp, int self) {
    auto g = tp.grad(self);
    auto ga = tp.grad(ai);
    for (std::size_t i = 0; i < r.size(); ++i) ga.row(r[i]) += g.row(static_cast<Index>(i));
  });
}

Var row_update(Var base, std::span<const int> rows, Var replacement) {
  Tape& t = tape_of(base);
  same_tape(base, replacement);
  require(replacement.rows() == static_cast<Index>(rows.size()) && replacement.cols() == base.cols(),
          "row_update", "replacement " + dims(replacement) + " for " + std::to_string(rows.size()) + " rows");
  Matrix y = base.value();
  auto rv = replacement.value();
  std::vector<char> hit(static_cast<std::size_t>(y.rows()), 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i] >= 0 && rows[i] < y.rows(), "row_update", "row index out of range");
    require(!hit[static_cast<std::size_t>(rows[i])], "row_update", "duplicate row index");
    hit[static_cast<std::size_t>(rows[i])] = 1;
    y.row(rows[i]) = rv.row(static_cast<Index>(i));
  }
  const int bi = base.id(), ri = replacement.id();
  std::vector<int> r(rows.begin(), rows.end());
  return t.record(std::move(y), needs(base) || needs(replacement),
                  [bi, ri, r = std::move(r), hit = std::move(hit)](Tape& tp, int self) {
                    auto g = tp.grad(self);
                    if (tp.needs_grad(bi)) {
                      auto gb = tp.grad(bi);
                      for (Index i = 0; i < g.rows(); ++i) {
                        if (!hit[static_cast<std::size_t>(i)]) gb.row(i) += g.row(i);
                      }
                    }
                    if (tp.needs_grad(ri)) {
                      auto gr = tp.grad(ri);
                      for (std::size_t i = 0; i < r.size(); ++i) gr.row(static_cast<Index>(i)) += g.row(r[i]);
                    }
                  });
}

Var scale_rows(Var m, Var a) {
  Tape& t = tape_of(m);
  same_tape(m, a);
  require(a.cols() == 1 && a.rows() == m.rows(), "scale_rows", "scale " + dims(a) + " for " + dims(m));
  Matrix y = m.value().array().colwise() * a.value().col(0).array();
  const int mi = m.id(), ai = a.id();
  return t.record(std::move(y), needs(m) || needs(a), [mi, ai](Tape& tp, int self) {
    auto g = tp.grad(self);
    if (tp.needs_grad(mi)) tp.grad(mi).array() += g.array().colwise() * tp.value(ai).col(0).array();
    if (tp.needs_grad(ai)) tp.grad(ai).col(0) += g.cwiseProduct(tp.value(mi)).rowwise().sum();
  });
}

Var segment_sum(Var m, const std::vector<std::vector<int>>& segments) {
  Tape& t = tape_of(m);
  auto mv = m.value();
  Matrix y = Matrix::Zero(static_cast<Index>(segments.size()), m.cols());
  for (std::size_t s = 0; s < segments.size(); ++s) {
    for (int r : segments[s]) {
      require(r >= 0 && r < mv.rows(), "segment_sum", "row index out of range");
      y.row(static_cast<Index>(s)) += mv.row(r);
    }
  }
  const int mi = m.id();
  return t.record(std::move(y), needs(m), [mi, segments](Tape& tp, int self) {
    auto g = tp.grad(self);
    auto gm = tp.grad(mi);
    for (std::size_t s = 0; s < segments.size(); ++s) {
      for (int r : segments[s]) gm.row(r) += g.row(static_cast<Index>(s));
    }
  });
}

Var segment_max(Var m, const std::vector<std::vector<int>>& segments) {
  Tape& t = tape_of(m);
  auto mv = m.value();
  const Index cols = m.cols();
  Matrix y = Matrix::Zero(static_cast<Index>(segments.size()), cols);
  std::vector<int> argmax(segments.size() * static_cast<std::size_t>(cols), -1);
  for (std::size_t s = 0; s < segments.size(); ++s) {
    for (int r : segments[s]) require(r >= 0 && r < mv.rows(), "segment_max", "row index out of range");
    if (segments[s].empty()) continue;
    for (Index c = 0; c < cols; ++c) {
      int best = segments[s][0];
      for (int r : segments[s]) {
        if (mv(r, c) > mv(best, c)) best = r;
      }
      y(static_cast<Index>(s), c) = mv(best, c);
      argmax[s * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)] = best;
    }
  }
  const int mi = m.id();
  return t.record(std::move(y), needs(m), [mi, cols, argmax = std::move(argmax)](Tape& tp, int self) {
    auto g = tp.grad(self);
    auto gm = tp.grad(mi);
    for (Index s = 0; s < g.rows(); ++s) {
      for (Index c = 0; c < cols; ++c) {
        const int r = argmax[static_cast<std::size_t>(s * cols + c)];
        if (r >= 0) gm(r, c) += g(s, c);
      }
    }
  });
}

Var softmax(Var x) {
  Tape& t = tape_of(x);
  auto xv = x.value();
  Matrix y(xv.rows(), xv.cols());
  for (Index i = 0; i < xv.rows(); ++i) {
    const double mx = xv.row(i).maxCoeff();
    y.row(i) = (xv.row(i).array() - mx).exp().matrix();
    y.row(i) /= y.row(i).sum();
  }
  const int xi = x.id();
  return t.record(std::move(y), needs(x), [xi](Tape& tp, int self) {
    auto p = tp.value(self);
    auto g = tp.grad(self);
    auto gx = tp.grad(xi);
    for (Index i = 0; i < p.rows(); ++i) {
      const double dot = g.row(i).dot(p.row(i));
      gx.row(i).array() += p.row(i).array() * (g.row(i).array() - dot);
    }
  });
}

Var sum(Var x) {
  Tape& t = tape_of(x);
  Matrix y(1, 1);
  y(0, 0) = x.value().sum();
  const int xi = x.id();
  return t.record(std::move(y), needs(x), [xi](Tape& tp, int self) {
    tp.grad(xi).array() += tp.grad(self)(0, 0);
  });
}

Var cross_entropy(Var probs, int target) {
  Tape& t = tape_of(probs);
  require(probs.rows() == 1, "cross_entropy", "expects a single probability row");
  require(target >= 0 && target < probs.cols(), "cross_entropy", "target out of range");
  const double p = probs.value()(0, target);
  const bool clamped = p < kProbFloor;  // NaN passes through
  if (clamped) g_ce_clamps.fetch_add(1);
  Matrix y(1, 1);
  y(0, 0) = -std::log(clamped ? kProbFloor : p);
  const int pi = probs.id();
  return t.record(std::move(y), needs(probs), [pi, target, p, clamped](Tape& tp, int self) {
    if (clamped) return;
    tp.grad(pi)(0, target) -= tp.grad(self)(0, 0) / p;
  });
}

Var squared_error(Var pred, std::span<const double> target) {
  Tape& t = tape_of(pred);
  require(pred.rows() == 1 && pred.cols() == static_cast<Index>(target.size()), "squared_error",
          "prediction " + dims(pred) + " for target of length " + std::to_string(target.size()));
  Matrix diff = pred.value();
  for (std::size_t i = 0; i < target.size(); ++i) diff(0, static_cast<Index>(i)) -= target[i];
  Matrix y(1, 1);
  y(0, 0) = diff.squaredNorm();
  const int pi = pred.id();
  return t.record(std::move(y), needs(pred), [pi, diff = std::move(diff)](Tape& tp, int self) {
    tp.grad(pi) += 2.0 * tp.grad(self)(0, 0) * diff;
  });
}

}  // namespace sgnet::ad
