// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
#include <stdexcept>

#include "sgnet/autodiff.hpp"

namespace sgnet::ad {

ConstMatrixMap Var::value() const { return tape_->value(id_); }
Index Var::rows() const { return value().rows(); }
Index Var::cols() const { return value().cols(); }

double Var::scalar() const {
  auto v = value();
  if (v.size() != 1) throw std::logic_error("scalar() on a non-scalar value");
  return v(0, 0);
}

Matrix Var::grad() const { return tape_->grad_copy(id_); }

Var Tape::param(Parameter& p) {
  Node n;
  n.external = p.value.data();
  n.rows = p.value.rows();
  n.cols = p.value.cols();
  n.needs_grad = record_;
  if (record_) {
    if (p.grad.size() != p.value.size()) p.grad = Tensor(p.value.shape(), 0.0);
    n.external_grad = p.grad.data();
  }
  nodes_.push_back(std::move(n));
  return {this, static_cast<int>(nodes_.size() - 1)};
}

Var Tape::param(const Parameter& p) {
  Node n;
  n.external = p.value.data();
  n.rows = p.value.rows();
  n.cols = p.value.cols();
  nodes_.push_back(std::move(n));
  return {this, static_cast<int>(nodes_.size() - 1)};
}

Var Tape::constant(Matrix value) { return record(std::move(value), false, nullptr); }

Var Tape::constant(const Tensor& value) { return constant(Matrix(value.mat())); }

Var Tape::zeros(Index rows, Index cols) { return constant(Matrix::Zero(rows, cols)); }

Var Tape::record(Matrix value, bool needs_grad, Backward backward) {
  Node n;
  n.rows = value.rows();
  n.cols = value.cols();
  n.value = std::move(value);
  n.needs_grad = needs_grad && record_;
  if (n.needs_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return {this, static_cast<int>(nodes_.size() - 1)};
}

ConstMatrixMap Tape::value(int id) const {
  const Node& n = nodes_.at(static_cast<std::size_t>(id));
  return {n.external != nullptr ? n.external : n.value.data(), n.rows, n.cols};
}

MatrixMap Tape::grad(int id) {
  Node& n = nodes_.at(static_cast<std::size_t>(id));
  n.grad_touched = true;
  if (n.external_grad != nullptr) return {n.external_grad, n.rows, n.cols};
  if (n.grad.size() == 0) n.grad = Matrix::Zero(n.rows, n.cols);
  return {n.grad.data(), n.rows, n.cols};
}

bool Tape::has_grad(int id) const { return nodes_.at(static_cast<std::size_t>(id)).grad_touched; }

Matrix Tape::grad_copy(int id) const {
  const Node& n = nodes_.at(static_cast<std::size_t>(id));
  if (n.external_grad != nullptr) return ConstMatrixMap(n.external_grad, n.rows, n.cols);
  if (n.grad.size() == 0) return Matrix::Zero(n.rows, n.cols);
  return n.grad;
}

void Tape::backward(Var loss, double seed) {
  if (loss.tape() != this) throw std::invalid_argument("loss belongs to a different tape");
  if (!record_) throw std::logic_error("backward on a tape that does not record gradients");
  const auto& root = nodes_.at(static_cast<std::size_t>(loss.id()));
  if (root.rows * root.cols != 1) throw std::invalid_argument("backward needs a scalar loss");
  if (!root.needs_grad) return;
  grad(loss.id())(0, 0) += seed;
  for (int id = loss.id(); id >= 0; --id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.backward && n.grad_touched) n.backward(*this, id);
  }
}

}  // namespace sgnet::ad
