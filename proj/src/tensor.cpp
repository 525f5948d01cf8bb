// Copyright (c) 2026, The RATS Authors
// SPDX-License-Identifier: Apache-2.0

#include "rats/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "rats/error.hpp"

namespace rats {

namespace detail {

using BackwardFn = std::function<void(std::span<const double> grad_out,
                                      std::span<std::vector<double>*> parent_grads)>;

struct Node {
  Shape shape;
  std::vector<double> value;
  bool requires_grad = false;
  bool leaf = true;
  LeafId id = 0;
  std::string op = "leaf";
  std::vector<std::shared_ptr<Node>> parents;
  BackwardFn backward;
};

namespace {
std::atomic<LeafId> next_leaf_id{1};
}  // namespace

struct OpBuilder {
  static Tensor leaf(Shape shape, std::vector<double> values, bool requires_grad) {
    if (values.size() != numel_of(shape)) {
      throw ShapeError("tensor: " + std::to_string(values.size()) +
                       " values do not fill shape " + to_string(shape));
    }
    auto node = std::make_shared<Node>();
    node->shape = std::move(shape);
    node->value = std::move(values);
    node->requires_grad = requires_grad;
    node->id = next_leaf_id.fetch_add(1, std::memory_order_relaxed);
    return Tensor(std::move(node));
  }

  // Records history only when some input requires a gradient.
  static Tensor result(std::string op, Shape shape, std::vector<double> values,
                       std::initializer_list<const Tensor*> inputs, BackwardFn backward) {
    auto node = std::make_shared<Node>();
    node->shape = std::move(shape);
    node->value = std::move(values);
    node->op = std::move(op);
    bool tracked = false;
    for (const Tensor* t : inputs) tracked = tracked || t->requires_grad();
    if (tracked) {
      node->requires_grad = true;
      node->leaf = false;
      for (const Tensor* t : inputs) node->parents.push_back(t->node_);
      node->backward = std::move(backward);
    }
    return Tensor(std::move(node));
  }

  static Tensor result_n(std::string op, Shape shape, std::vector<double> values,
                         std::span<const Tensor> inputs, BackwardFn backward) {
    auto node = std::make_shared<Node>();
    node->shape = std::move(shape);
    node->value = std::move(values);
    node->op = std::move(op);
    bool tracked = false;
    for (const Tensor& t : inputs) tracked = tracked || t.requires_grad();
    if (tracked) {
      node->requires_grad = true;
      node->leaf = false;
      for (const Tensor& t : inputs) node->parents.push_back(t.node_);
      node->backward = std::move(backward);
    }
    return Tensor(std::move(node));
  }

  static const std::shared_ptr<Node>& node_of(const Tensor& t) { return t.node_; }
};

}  // namespace detail

using detail::OpBuilder;

std::size_t numel_of(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

// ---------------------------------------------------------------------------
// Tensor

Tensor Tensor::constant(Shape shape, std::vector<double> values) {
  return OpBuilder::leaf(std::move(shape), std::move(values), false);
}

Tensor Tensor::scalar(double value) { return constant({}, {value}); }

Tensor Tensor::zeros(Shape shape) { return full(std::move(shape), 0.0); }

Tensor Tensor::full(Shape shape, double value) {
  std::vector<double> v(numel_of(shape), value);
  return constant(std::move(shape), std::move(v));
}

Tensor Tensor::parameter(Shape shape, std::vector<double> values) {
  return OpBuilder::leaf(std::move(shape), std::move(values), true);
}

const Shape& Tensor::shape() const { return node_->shape; }
std::size_t Tensor::numel() const { return node_->value.size(); }

std::size_t Tensor::rows() const {
  if (rank() != 2) throw ShapeError("rows(): expected rank-2 tensor, got " + to_string(shape()));
  return shape()[0];
}

std::size_t Tensor::cols() const {
  if (rank() != 2) throw ShapeError("cols(): expected rank-2 tensor, got " + to_string(shape()));
  return shape()[1];
}

std::span<const double> Tensor::values() const { return node_->value; }

double Tensor::item() const {
  if (numel() != 1) throw ShapeError("item(): tensor of shape " + to_string(shape()) + " is not a scalar");
  return node_->value[0];
}

double Tensor::at(std::size_t row, std::size_t col) const {
  return node_->value[row * cols() + col];
}

bool Tensor::requires_grad() const { return node_ && node_->requires_grad; }
bool Tensor::has_history() const { return node_ && !node_->leaf; }
bool Tensor::is_leaf() const { return node_ && node_->leaf; }
LeafId Tensor::id() const { return node_->id; }
const std::string& Tensor::op_name() const { return node_->op; }

// ---------------------------------------------------------------------------
// Elementwise binary ops

namespace {

enum class Broadcast { None, LeftScalar, RightScalar };

Broadcast check_binary(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() == b.shape()) return Broadcast::None;
  if (a.rank() == 0) return Broadcast::LeftScalar;
  if (b.rank() == 0) return Broadcast::RightScalar;
  throw ShapeError(std::string(op) + ": shape mismatch " + to_string(a.shape()) + " vs " +
                   to_string(b.shape()) + " (only rank-0 operands broadcast)");
}

// Accumulates `g` into `dst`; when the operand was broadcast from a scalar
// the contributions are summed into its single element.
void accumulate(std::vector<double>& dst, std::span<const double> g, bool scalar_operand) {
  if (scalar_operand) {
    double s = 0.0;
    for (double v : g) s += v;
    dst[0] += s;
  } else {
    for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i];
  }
}

template <class F>
std::vector<double> zip(const Tensor& a, const Tensor& b, Broadcast bc, F f) {
  auto av = a.values();
  auto bv = b.values();
  const std::size_t n = bc == Broadcast::LeftScalar ? bv.size() : av.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = bc == Broadcast::LeftScalar ? av[0] : av[i];
    const double y = bc == Broadcast::RightScalar ? bv[0] : bv[i];
    out[i] = f(x, y);
  }
  return out;
}

Shape result_shape(const Tensor& a, const Tensor& b, Broadcast bc) {
  return bc == Broadcast::LeftScalar ? b.shape() : a.shape();
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  const Broadcast bc = check_binary("add", a, b);
  auto out = zip(a, b, bc, [](double x, double y) { return x + y; });
  return OpBuilder::result("add", result_shape(a, b, bc), std::move(out), {&a, &b},
                           [bc](std::span<const double> g, std::span<std::vector<double>*> pg) {
                             if (pg[0]) accumulate(*pg[0], g, bc == Broadcast::LeftScalar);
                             if (pg[1]) accumulate(*pg[1], g, bc == Broadcast::RightScalar);
                           });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  const Broadcast bc = check_binary("sub", a, b);
  auto out = zip(a, b, bc, [](double x, double y) { return x - y; });
  return OpBuilder::result("sub", result_shape(a, b, bc), std::move(out), {&a, &b},
                           [bc](std::span<const double> g, std::span<std::vector<double>*> pg) {
                             if (pg[0]) accumulate(*pg[0], g, bc == Broadcast::LeftScalar);
                             if (pg[1]) {
                               std::vector<double> ng(g.begin(), g.end());
                               for (double& v : ng) v = -v;
                               accumulate(*pg[1], ng, bc == Broadcast::RightScalar);
                             }
                           });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  const Broadcast bc = check_binary("mul", a, b);
  auto out = zip(a, b, bc, [](double x, double y) { return x * y; });
  auto an = OpBuilder::node_of(a);
  auto bn = OpBuilder::node_of(b);
  return OpBuilder::result(
      "mul", result_shape(a, b, bc), std::move(out), {&a, &b},
      [an, bn, bc](std::span<const double> g, std::span<std::vector<double>*> pg) {
        const auto& av = an->value;
        const auto& bv = bn->value;
        std::vector<double> t(g.size());
        if (pg[0]) {
          for (std::size_t i = 0; i < g.size(); ++i)
            t[i] = g[i] * (bc == Broadcast::RightScalar ? bv[0] : bv[i]);
          accumulate(*pg[0], t, bc == Broadcast::LeftScalar);
        }
        if (pg[1]) {
          for (std::size_t i = 0; i < g.size(); ++i)
            t[i] = g[i] * (bc == Broadcast::LeftScalar ? av[0] : av[i]);
          accumulate(*pg[1], t, bc == Broadcast::RightScalar);
        }
      });
}

Tensor div(const Tensor& a, const Tensor& b) {
  const Broadcast bc = check_binary("div", a, b);
  auto out = zip(a, b, bc, [](double x, double y) { return x / y; });
  auto an = OpBuilder::node_of(a);
  auto bn = OpBuilder::node_of(b);
  return OpBuilder::result(
      "div", result_shape(a, b, bc), std::move(out), {&a, &b},
      [an, bn, bc](std::span<const double> g, std::span<std::vector<double>*> pg) {
        const auto& av = an->value;
        const auto& bv = bn->value;
        std::vector<double> t(g.size());
        if (pg[0]) {
          for (std::size_t i = 0; i < g.size(); ++i)
            t[i] = g[i] / (bc == Broadcast::RightScalar ? bv[0] : bv[i]);
          accumulate(*pg[0], t, bc == Broadcast::LeftScalar);
        }
        if (pg[1]) {
          for (std::size_t i = 0; i < g.size(); ++i) {
            const double x = bc == Broadcast::LeftScalar ? av[0] : av[i];
            const double y = bc == Broadcast::RightScalar ? bv[0] : bv[i];
            t[i] = -g[i] * x / (y * y);
          }
          accumulate(*pg[1], t, bc == Broadcast::RightScalar);
        }
      });
}

Tensor add(const Tensor& a, double b) {
  std::vector<double> out(a.values().begin(), a.values().end());
  for (double& v : out) v += b;
  return OpBuilder::result("add_scalar", a.shape(), std::move(out), {&a},
                           [](std::span<const double> g, std::span<std::vector<double>*> pg) {
                             accumulate(*pg[0], g, false);
                           });
}

Tensor mul(const Tensor& a, double b) {
  std::vector<double> out(a.values().begin(), a.values().end());
  for (double& v : out) v *= b;
  return OpBuilder::result("scale", a.shape(), std::move(out), {&a},
                           [b](std::span<const double> g, std::span<std::vector<double>*> pg) {
                             auto& dst = *pg[0];
                             for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i] * b;
                           });
}

Tensor neg(const Tensor& a) { return mul(a, -1.0); }

Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }
Tensor operator/(const Tensor& a, const Tensor& b) { return div(a, b); }
Tensor operator+(const Tensor& a, double b) { return add(a, b); }
Tensor operator+(double a, const Tensor& b) { return add(b, a); }
Tensor operator-(const Tensor& a, double b) { return add(a, -b); }
Tensor operator-(double a, const Tensor& b) { return add(neg(b), a); }
Tensor operator*(const Tensor& a, double b) { return mul(a, b); }
Tensor operator*(double a, const Tensor& b) { return mul(b, a); }
Tensor operator-(const Tensor& a) { return neg(a); }

// ---------------------------------------------------------------------------
// Linear algebra and reductions

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.cols() != b.rows()) {
    throw ShapeError("matmul: incompatible shapes " + to_string(a.shape()) + " x " +
                     to_string(b.shape()));
  }
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  auto av = a.values();
  auto bv = b.values();
  std::vector<double> out(m * n, 0.0);
  const double* __restrict ap = av.data();
  const double* __restrict bp = bv.data();
  double* __restrict op = out.data();
  for (std::size_t i = 0; i < m; ++i) {
    double* __restrict row = op + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double s = ap[i * k + p];
      const double* __restrict brow = bp + p * n;
      for (std::size_t j = 0; j < n; ++j) row[j] += s * brow[j];
    }
  }
  auto an = OpBuilder::node_of(a);
  auto bn = OpBuilder::node_of(b);
  return OpBuilder::result(
      "matmul", {m, n}, std::move(out), {&a, &b},
      [an, bn, m, k, n](std::span<const double> g, std::span<std::vector<double>*> pg) {
        const auto& av = an->value;
        const auto& bv = bn->value;
        if (pg[0]) {  // dA = G B^T
          auto& da = *pg[0];
          for (std::size_t i = 0; i < m; ++i)
            for (std::size_t p = 0; p < k; ++p) {
              double s = 0.0;
              for (std::size_t j = 0; j < n; ++j) s += g[i * n + j] * bv[p * n + j];
              da[i * k + p] += s;
            }
        }
        if (pg[1]) {  // dB = A^T G
          auto& db = *pg[1];
          for (std::size_t i = 0; i < m; ++i)
            for (std::size_t p = 0; p < k; ++p) {
              const double s = av[i * k + p];
              for (std::size_t j = 0; j < n; ++j) db[p * n + j] += s * g[i * n + j];
            }
        }
      });
}

Tensor sum(const Tensor& a) {
  double s = 0.0;
  for (double v : a.values()) s += v;
  return OpBuilder::result("sum", {}, {s}, {&a},
                           [](std::span<const double> g, std::span<std::vector<double>*> pg) {
                             for (double& v : *pg[0]) v += g[0];
                           });
}

Tensor mean(const Tensor& a) {
  if (a.numel() == 0) throw ShapeError("mean: empty tensor");
  double s = 0.0;
  for (double v : a.values()) s += v;
  const double n = static_cast<double>(a.numel());
  return OpBuilder::result("mean", {}, {s / n}, {&a},
                           [n](std::span<const double> g, std::span<std::vector<double>*> pg) {
                             for (double& v : *pg[0]) v += g[0] / n;
                           });
}

Tensor row_sum(const Tensor& a) {
  const std::size_t m = a.rows(), n = a.cols();
  auto av = a.values();
  std::vector<double> out(m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i] += av[i * n + j];
  return OpBuilder::result("row_sum", {m, 1}, std::move(out), {&a},
                           [m, n](std::span<const double> g, std::span<std::vector<double>*> pg) {
                             auto& d = *pg[0];
                             for (std::size_t i = 0; i < m; ++i)
                               for (std::size_t j = 0; j < n; ++j) d[i * n + j] += g[i];
                           });
}

// ---------------------------------------------------------------------------
// Pointwise nonlinearities

namespace {

// f gives the value, df(x, y) the local derivative from input x and output y.
// Local derivatives are materialized only when the result is tracked.
template <class F, class DF>
Tensor unary(const char* op, const Tensor& a, F f, DF df) {
  auto av = a.values();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = f(av[i]);
  std::vector<double> local;
  if (a.requires_grad()) {
    local.resize(av.size());
    for (std::size_t i = 0; i < av.size(); ++i) local[i] = df(av[i], out[i]);
  }
  return OpBuilder::result(op, a.shape(), std::move(out), {&a},
                           [local = std::move(local)](std::span<const double> g,
                                                      std::span<std::vector<double>*> pg) {
                             auto& d = *pg[0];
                             for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * local[i];
                           });
}

}  // namespace

Tensor tanh(const Tensor& a) {
  return unary(
      "tanh", a, [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor square(const Tensor& a) {
  return unary(
      "square", a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Tensor sqrt(const Tensor& a) {
  return unary(
      "sqrt", a, [](double x) { return std::sqrt(x); },
      [](double, double y) { return 0.5 / y; });
}

Tensor exp(const Tensor& a) {
  return unary(
      "exp", a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor dot(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError("dot: shape mismatch " + to_string(a.shape()) + " vs " + to_string(b.shape()));
  }
  auto av = a.values();
  auto bv = b.values();
  double s = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) s += av[i] * bv[i];
  auto an = OpBuilder::node_of(a);
  auto bn = OpBuilder::node_of(b);
  return OpBuilder::result("dot", {}, {s}, {&a, &b},
                           [an, bn](std::span<const double> g, std::span<std::vector<double>*> pg) {
                             if (pg[0])
                               for (std::size_t i = 0; i < bn->value.size(); ++i)
                                 (*pg[0])[i] += g[0] * bn->value[i];
                             if (pg[1])
                               for (std::size_t i = 0; i < an->value.size(); ++i)
                                 (*pg[1])[i] += g[0] * an->value[i];
                           });
}

Tensor frobenius_sq(const Tensor& a) {
  double s = 0.0;
  for (double v : a.values()) s += v * v;
  auto an = OpBuilder::node_of(a);
  return OpBuilder::result("frobenius_sq", {}, {s}, {&a},
                           [an](std::span<const double> g, std::span<std::vector<double>*> pg) {
                             for (std::size_t i = 0; i < an->value.size(); ++i)
                               (*pg[0])[i] += 2.0 * g[0] * an->value[i];
                           });
}

// ---------------------------------------------------------------------------
// Structural ops

Tensor concat(std::span<const Tensor> parts, std::size_t axis) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  if (axis > 1) throw ShapeError("concat: axis must be 0 or 1");
  for (const Tensor& p : parts) {
    if (p.rank() != 2) throw ShapeError("concat: expected rank-2 inputs, got " + to_string(p.shape()));
  }
  const std::size_t fixed = axis == 0 ? parts[0].cols() : parts[0].rows();
  std::size_t total = 0;
  for (const Tensor& p : parts) {
    const std::size_t f = axis == 0 ? p.cols() : p.rows();
    if (f != fixed) {
      throw ShapeError("concat: mismatched " + std::string(axis == 0 ? "column" : "row") +
                       " count " + to_string(p.shape()) + " vs " + to_string(parts[0].shape()));
    }
    total += axis == 0 ? p.rows() : p.cols();
  }
  const Shape shape = axis == 0 ? Shape{total, fixed} : Shape{fixed, total};
  std::vector<double> out(numel_of(shape));
  std::vector<std::size_t> widths;
  std::size_t offset = 0;
  for (const Tensor& p : parts) {
    auto pv = p.values();
    if (axis == 0) {
      std::copy(pv.begin(), pv.end(), out.begin() + static_cast<std::ptrdiff_t>(offset * fixed));
      widths.push_back(p.rows());
      offset += p.rows();
    } else {
      const std::size_t w = p.cols();
      for (std::size_t r = 0; r < fixed; ++r)
        for (std::size_t c = 0; c < w; ++c) out[r * total + offset + c] = pv[r * w + c];
      widths.push_back(w);
      offset += w;
    }
  }
  return OpBuilder::result_n(
      "concat", shape, std::move(out), parts,
      [axis, widths, fixed, total](std::span<const double> g, std::span<std::vector<double>*> pg) {
        std::size_t off = 0;
        for (std::size_t k = 0; k < widths.size(); ++k) {
          const std::size_t w = widths[k];
          if (pg[k]) {
            auto& d = *pg[k];
            if (axis == 0) {
              for (std::size_t i = 0; i < w * fixed; ++i) d[i] += g[off * fixed + i];
            } else {
              for (std::size_t r = 0; r < fixed; ++r)
                for (std::size_t c = 0; c < w; ++c) d[r * w + c] += g[r * total + off + c];
            }
          }
          off += w;
        }
      });
}

Tensor concat(std::initializer_list<Tensor> parts, std::size_t axis) {
  return concat(std::span<const Tensor>(parts.begin(), parts.size()), axis);
}

Tensor select_rows(const Tensor& a, std::span<const std::size_t> rows) {
  const std::size_t n = a.cols();
  const std::size_t m = a.rows();
  std::vector<std::size_t> idx(rows.begin(), rows.end());
  std::vector<double> out(idx.size() * n);
  auto av = a.values();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= m) throw ShapeError("select_rows: row " + std::to_string(idx[i]) + " out of range for " + to_string(a.shape()));
    std::copy_n(av.begin() + static_cast<std::ptrdiff_t>(idx[i] * n), n, out.begin() + static_cast<std::ptrdiff_t>(i * n));
  }
  return OpBuilder::result("select_rows", {idx.size(), n}, std::move(out), {&a},
                           [idx, n](std::span<const double> g, std::span<std::vector<double>*> pg) {
                             auto& d = *pg[0];
                             for (std::size_t i = 0; i < idx.size(); ++i)
                               for (std::size_t j = 0; j < n; ++j) d[idx[i] * n + j] += g[i * n + j];
                           });
}

Tensor stop_gradient(const Tensor& x) {
  auto v = x.values();
  return OpBuilder::result("stop_gradient", x.shape(), std::vector<double>(v.begin(), v.end()), {},
                           nullptr);
}

// ---------------------------------------------------------------------------
// Backward sweep

const Tensor& GradientMap::at(LeafId id) const {
  auto it = grads_.find(id);
  if (it == grads_.end()) throw std::out_of_range("GradientMap: no gradient for leaf " + std::to_string(id));
  return it->second;
}

const Tensor* GradientMap::find(LeafId id) const {
  auto it = grads_.find(id);
  return it == grads_.end() ? nullptr : &it->second;
}

GradientMap backward(const Tensor& loss) {
  if (!loss.defined()) throw ShapeError("backward: undefined tensor");
  if (loss.numel() != 1) {
    throw ShapeError("backward: loss must be scalar, got shape " + to_string(loss.shape()));
  }
  GradientMap result;
  if (!loss.requires_grad()) return result;

  // Iterative post-order DFS gives a topological order without recursion.
  std::vector<detail::Node*> order;
  std::unordered_set<detail::Node*> visited;
  std::vector<std::pair<detail::Node*, std::size_t>> stack;
  auto* root = const_cast<detail::Node*>(loss.node());
  stack.emplace_back(root, 0);
  visited.insert(root);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      detail::Node* p = node->parents[next++].get();
      if (p->requires_grad && visited.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  std::unordered_map<detail::Node*, std::vector<double>> grads;
  grads[root] = std::vector<double>(1, 1.0);
  std::vector<std::vector<double>*> parent_grads;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::Node* node = *it;
    auto git = grads.find(node);
    if (git == grads.end()) continue;
    if (node->leaf) continue;
    parent_grads.assign(node->parents.size(), nullptr);
    for (std::size_t k = 0; k < node->parents.size(); ++k) {
      detail::Node* p = node->parents[k].get();
      if (!p->requires_grad) continue;
      auto [pit, inserted] = grads.try_emplace(p);
      if (inserted) pit->second.assign(p->value.size(), 0.0);
      parent_grads[k] = &pit->second;
    }
    // try_emplace may rehash; look the output gradient up again.
    const auto& g = grads.at(node);
    node->backward(g, parent_grads);
  }

  for (detail::Node* node : order) {
    if (!node->leaf) continue;
    auto git = grads.find(node);
    if (git == grads.end()) continue;
    result.grads_.emplace(node->id, Tensor::constant(node->shape, std::move(git->second)));
  }
  return result;
}

}  // namespace rats
