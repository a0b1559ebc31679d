// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
//
// Dense float64 tensors and a reverse-mode tape. Everything is a row-major
// matrix underneath; a rank-1 tensor of length n is viewed as a 1 x n row.
// Batched ops treat each row as one sample.
#pragma once

#include <Eigen/Core>
#include <atomic>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace sgnet::ad {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<Matrix>;
using ConstMatrixMap = Eigen::Map<const Matrix>;
using Index = Eigen::Index;

class Tensor {
 public:
  // Fixed 64-byte alignment keeps vectorized reductions in the same order
  // for every copy of a tensor, which bit-reproducible training relies on.
  using Storage = std::vector<double, Eigen::aligned_allocator<double>>;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);
  Tensor(std::vector<std::size_t> shape, std::vector<double> values);
  static Tensor from_matrix(const Matrix& m);

  const std::vector<std::size_t>& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return values_.size(); }
  /// Leading dimension for rank 2, 1 otherwise.
  Index rows() const noexcept;
  /// Trailing dimension (all values for rank <= 1).
  Index cols() const noexcept;

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  MatrixMap mat() { return {values_.data(), rows(), cols()}; }
  ConstMatrixMap mat() const { return {values_.data(), rows(), cols()}; }

  bool all_finite() const noexcept;
  void fill(double v);

  bool requires_grad = false;

  bool operator==(const Tensor& o) const { return shape_ == o.shape_ && values_ == o.values_; }

 private:
  std::vector<std::size_t> shape_;
  Storage values_;
};

/// A learnable tensor with its gradient accumulator.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
  bool decay = true;  // biases are exempt from weight decay

  Parameter() = default;
  Parameter(std::string n, Tensor v, bool weight_decay);
  void zero_grad() { grad.fill(0.0); }
};

class Tape;

/// Handle to a value recorded on a Tape.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}

  bool valid() const noexcept { return tape_ != nullptr; }
  int id() const noexcept { return id_; }
  Tape* tape() const noexcept { return tape_; }

  ConstMatrixMap value() const;
  Index rows() const;
  Index cols() const;
  double scalar() const;
  /// Gradient accumulated by the last backward pass (zeros if none reached it).
  Matrix grad() const;

 private:
  Tape* tape_ = nullptr;
  int id_ = -1;
};

/// Records a single forward pass. Not thread-safe; use one tape per thread.
class Tape {
 public:
  explicit Tape(bool record_gradients = true) : record_(record_gradients) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const noexcept { return record_; }

  /// Leaf that reads the parameter's storage in place and accumulates its
  /// gradient into `param.grad`.
  Var param(Parameter& param);
  /// Read-only parameter leaf (inference).
  Var param(const Parameter& param);
  Var constant(Matrix value);
  Var constant(const Tensor& value);
  Var zeros(Index rows, Index cols);

  /// Seeds d(loss)/d(loss) = seed and runs every recorded backward rule once,
  /// in reverse recording order.
  void backward(Var loss, double seed = 1.0);

  std::size_t size() const noexcept { return nodes_.size(); }

  // Building blocks for ops -------------------------------------------------
  using Backward = std::function<void(Tape&, int)>;
  Var record(Matrix value, bool needs_grad, Backward backward);
  ConstMatrixMap value(int id) const;
  bool needs_grad(int id) const { return nodes_[static_cast<std::size_t>(id)].needs_grad; }
  /// Gradient accumulator of node `id` (allocated on first use).
  MatrixMap grad(int id);
  bool has_grad(int id) const;
  Matrix grad_copy(int id) const;

 private:
  struct Node {
    Matrix value;
    const double* external = nullptr;
    Index rows = 0;
    Index cols = 0;
    Matrix grad;
    double* external_grad = nullptr;
    bool needs_grad = false;
    bool grad_touched = false;
    Backward backward;
  };

  bool record_;
  std::vector<Node> nodes_;
};

// Ops --------------------------------------------------------------------
// Shapes are [rows x cols]; rank-1 inputs are single rows.

/// Y = X W^T + b with X [B x n], W [m x n], b [m] (optional).
Var affine(Var x, Var w, Var b = {});
/// Y[e] = [H[src[e]], H[dst[e]]] W^T + b for W [m x 2k], H [N x k]. Same
/// value as affine on the concatenated rows, computed from per-node
/// projections.
Var pair_affine(Var h, Var w, Var b, std::span<const int> src, std::span<const int> dst);
Var relu(Var x);
Var sigmoid(Var x);
Var tanh(Var x);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double s);
Var concat_cols(std::span<const Var> parts);
Var gather_rows(Var a, std::span<const int> rows);
/// Copy of `base` with rows `rows` replaced by the rows of `replacement`.
Var row_update(Var base, std::span<const int> rows, Var replacement);
/// out[e, :] = m[e, :] * a[e, 0]
Var scale_rows(Var m, Var a);
/// out[g] = sum of rows segments[g] (zero row for an empty segment).
Var segment_sum(Var m, const std::vector<std::vector<int>>& segments);
/// out[g] = elementwise max of rows segments[g] (zero row for an empty
/// segment). Ties route the gradient to the first maximal row.
Var segment_max(Var m, const std::vector<std::vector<int>>& segments);
/// Standard GRU cell, gate order (reset, update, candidate):
///   r = s(W_ir x + b_ir + W_hr h + b_hr)
///   z = s(W_iz x + b_iz + W_hz h + b_hz)
///   n = tanh(W_in x + b_in + r * (W_hn h + b_hn))
///   h' = (1 - z) * n + z * h
Var gru_cell(Var h, Var x, Var w_ih, Var w_hh, Var b_ih, Var b_hh);
/// Row-wise softmax with max subtraction.
Var softmax(Var x);
Var sum(Var x);
/// -log(p[target]) for a probability row; p[target] is clamped at 1e-12
/// (counted in cross_entropy_clamp_count()).
Var cross_entropy(Var probs, int target);
/// Squared Euclidean distance between `pred` and a constant target.
Var squared_error(Var pred, std::span<const double> target);

std::size_t cross_entropy_clamp_count();

}  // namespace sgnet::ad
