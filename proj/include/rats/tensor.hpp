// Copyright (c) 2026, The RATS Authors
// SPDX-License-Identifier: Apache-2.0
//
// Dense float64 arrays with a dynamic reverse-mode tape.
//
// Every operation whose inputs require gradients records its parents and a
// backward rule on the result. Nothing is recorded when all inputs are
// constants, so untracked evaluation (teacher rollouts, steps before the
// gradient window) pays no tape cost. Broadcasting is limited to a rank-0
// scalar operand.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace rats {

using Shape = std::vector<std::size_t>;
using LeafId = std::uint64_t;

std::size_t numel_of(const Shape& shape);
std::string to_string(const Shape& shape);

namespace detail {
struct Node;
struct OpBuilder;
}  // namespace detail

class Tensor {
 public:
  Tensor() = default;

  /// Constant leaf: never receives a gradient.
  static Tensor constant(Shape shape, std::vector<double> values);
  static Tensor scalar(double value);
  static Tensor zeros(Shape shape);
  static Tensor full(Shape shape, double value);
  /// Trainable leaf with a fresh identity.
  static Tensor parameter(Shape shape, std::vector<double> values);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t numel() const;
  /// Row/column counts of a rank-2 tensor.
  std::size_t rows() const;
  std::size_t cols() const;

  std::span<const double> values() const;
  double item() const;
  double at(std::size_t row, std::size_t col) const;

  bool requires_grad() const;
  /// True when the tensor was produced by a recorded operation.
  bool has_history() const;
  bool is_leaf() const;
  LeafId id() const;
  const std::string& op_name() const;

  const detail::Node* node() const { return node_.get(); }

 private:
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<detail::Node> node_;

  friend struct detail::OpBuilder;
};


// Elementwise arithmetic. Shapes must match, or one side must be rank-0.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, double b);
Tensor mul(const Tensor& a, double b);
Tensor neg(const Tensor& a);

Tensor operator+(const Tensor& a, const Tensor& b);
Tensor operator-(const Tensor& a, const Tensor& b);
Tensor operator*(const Tensor& a, const Tensor& b);
Tensor operator/(const Tensor& a, const Tensor& b);
Tensor operator+(const Tensor& a, double b);
Tensor operator+(double a, const Tensor& b);
Tensor operator-(const Tensor& a, double b);
Tensor operator-(double a, const Tensor& b);
Tensor operator*(const Tensor& a, double b);
Tensor operator*(double a, const Tensor& b);
Tensor operator-(const Tensor& a);

/// [m,k] x [k,n] -> [m,n].
Tensor matmul(const Tensor& a, const Tensor& b);

Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor square(const Tensor& a);
Tensor sqrt(const Tensor& a);
Tensor exp(const Tensor& a);

/// Inner product of two equal-shape tensors (rank-0 result).
Tensor dot(const Tensor& a, const Tensor& b);
Tensor frobenius_sq(const Tensor& a);

/// Concatenate rank-2 tensors along `axis` (0 = rows, 1 = columns).
Tensor concat(std::span<const Tensor> parts, std::size_t axis);
Tensor concat(std::initializer_list<Tensor> parts, std::size_t axis);

/// Gather rows of a rank-2 tensor.
Tensor select_rows(const Tensor& a, std::span<const std::size_t> rows);

/// Per-row sum of a rank-2 tensor, [m,n] -> [m,1].
Tensor row_sum(const Tensor& a);

/// Same values, no history; gradients never flow through the result.
Tensor stop_gradient(const Tensor& x);

class GradientMap {
 public:
  bool contains(LeafId id) const { return grads_.count(id) != 0; }
  const Tensor& at(LeafId id) const;
  const Tensor* find(LeafId id) const;
  std::size_t size() const { return grads_.size(); }
  bool empty() const { return grads_.empty(); }
  auto begin() const { return grads_.begin(); }
  auto end() const { return grads_.end(); }

 private:
  std::map<LeafId, Tensor> grads_;
  friend GradientMap backward(const Tensor& loss);
};

/// Reverse sweep from a rank-0 (or single element) loss. Only trainable
/// leaves reachable through recorded history receive an entry.
GradientMap backward(const Tensor& loss);

}  // namespace rats
