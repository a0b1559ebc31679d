// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
#include <cmath>
#include <stdexcept>
#include <string>

#include "sgnet/autodiff.hpp"

namespace sgnet::ad {

Var gru_cell(Var h, Var x, Var w_ih, Var w_hh, Var b_ih, Var b_hh) {
  for (Var v : {x, w_ih, w_hh, b_ih, b_hh}) {
    if (!v.valid() || v.tape() != h.tape()) throw std::invalid_argument("gru_cell: operands on different tapes");
  }
  Tape& t = *h.tape();
  const Index k = h.cols();
  const Index in = x.cols();
  if (w_ih.rows() != 3 * k || w_ih.cols() != in || w_hh.rows() != 3 * k || w_hh.cols() != k ||
      b_ih.cols() != 3 * k || b_hh.cols() != 3 * k || x.rows() != h.rows()) {
    throw std::invalid_argument("gru_cell: shape mismatch for state width " + std::to_string(k));
  }
  auto hv = h.value();
  Matrix gi = x.value() * w_ih.value().transpose();
  gi.rowwise() += b_ih.value().row(0);
  Matrix gh = hv * w_hh.value().transpose();
  gh.rowwise() += b_hh.value().row(0);

  auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  Matrix r = (gi.leftCols(k) + gh.leftCols(k)).unaryExpr(sig);
  Matrix z = (gi.middleCols(k, k) + gh.middleCols(k, k)).unaryExpr(sig);
  Matrix ghn = gh.rightCols(k);
  Matrix n = (gi.rightCols(k) + r.cwiseProduct(ghn)).array().tanh().matrix();
  Matrix y = (1.0 - z.array()) * n.array() + z.array() * hv.array();

  const bool any = t.needs_grad(h.id()) || t.needs_grad(x.id()) || t.needs_grad(w_ih.id()) ||
                   t.needs_grad(w_hh.id()) || t.needs_grad(b_ih.id()) || t.needs_grad(b_hh.id());
  const int hi = h.id(), xi = x.id(), wii = w_ih.id(), whi = w_hh.id(), bii = b_ih.id(), bhi = b_hh.id();
  return t.record(std::move(y), any,
                  [=, r = std::move(r), z = std::move(z), n = std::move(n), ghn = std::move(ghn)](Tape& tp,
                                                                                                 int self) {
                    auto g = tp.grad(self);
                    auto hv = tp.value(hi);
                    const Index rows = g.rows();
                    Matrix dgi(rows, 3 * k);
                    Matrix dgh(rows, 3 * k);
                    Matrix dn = (g.array() * (1.0 - z.array()) * (1.0 - n.array().square())).matrix();
                    Matrix dz = (g.array() * (hv.array() - n.array()) * z.array() * (1.0 - z.array())).matrix();
                    Matrix dr = (dn.array() * ghn.array() * r.array() * (1.0 - r.array())).matrix();
                    dgi << dr, dz, dn;
                    dgh << dr, dz, dn.cwiseProduct(r);
                    if (tp.needs_grad(xi)) tp.grad(xi).noalias() += dgi * tp.value(wii);
                    if (tp.needs_grad(hi)) {
                      auto gh = tp.grad(hi);
                      gh += g.cwiseProduct(z);
                      gh.noalias() += dgh * tp.value(whi);
                    }
                    if (tp.needs_grad(wii)) tp.grad(wii).noalias() += dgi.transpose() * tp.value(xi);
                    if (tp.needs_grad(whi)) tp.grad(whi).noalias() += dgh.transpose() * hv;
                    if (tp.needs_grad(bii)) tp.grad(bii).row(0) += dgi.colwise().sum();
                    if (tp.needs_grad(bhi)) tp.grad(bhi).row(0) += dgh.colwise().sum();
                  });
}

}  // namespace sgnet::ad
