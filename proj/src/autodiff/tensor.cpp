// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sgnet/autodiff.hpp"

namespace sgnet::ad {

namespace {

std::size_t element_count(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), values_(element_count(shape_), fill) {
  if (shape_.size() > 2) throw std::invalid_argument("tensor rank above 2 is not supported");
}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(values.begin(), values.end()) {
  if (shape_.size() > 2) throw std::invalid_argument("tensor rank above 2 is not supported");
  if (values_.size() != element_count(shape_)) {
    throw std::invalid_argument("tensor value count does not match its shape");
  }
}

Tensor Tensor::from_matrix(const Matrix& m) {
  std::vector<double> v(m.data(), m.data() + m.size());
  return Tensor({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())}, std::move(v));
}

Index Tensor::rows() const noexcept {
  return shape_.size() == 2 ? static_cast<Index>(shape_[0]) : 1;
}

Index Tensor::cols() const noexcept {
  if (shape_.size() == 2) return static_cast<Index>(shape_[1]);
  return static_cast<Index>(values_.size());
}

bool Tensor::all_finite() const noexcept {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void Tensor::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

Parameter::Parameter(std::string n, Tensor v, bool weight_decay)
    : name(std::move(n)), value(std::move(v)), grad(value.shape(), 0.0), decay(weight_decay) {
  value.requires_grad = true;
}

}  // namespace sgnet::ad
