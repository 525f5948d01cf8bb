// Copyright (c) 2026, The RATS Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <cmath>
#include <functional>

#include "rats/error.hpp"
#include "rats/tensor.hpp"
#include "support.hpp"

using namespace rats;
using rats::testing::central_diff;
using rats::testing::max_rel;
using rats::testing::random_values;
using rats::testing::to_vec;

namespace {

// Builds a scalar from two tensors, then checks d/da and d/db against
// central differences computed on plain values.
using BinaryLoss = std::function<Tensor(const Tensor&, const Tensor&)>;

void check_binary(const BinaryLoss& f, const Shape& sa, std::vector<double> va, const Shape& sb,
                  std::vector<double> vb, double tol = 1e-6) {
  const Tensor a = Tensor::parameter(sa, va);
  const Tensor b = Tensor::parameter(sb, vb);
  const GradientMap g = backward(f(a, b));
  const auto fa = [&](const std::vector<double>& x) {
    return f(Tensor::constant(sa, x), Tensor::constant(sb, vb)).item();
  };
  const auto fb = [&](const std::vector<double>& x) {
    return f(Tensor::constant(sa, va), Tensor::constant(sb, x)).item();
  };
  CHECK(max_rel(to_vec(g.at(a.id())), central_diff(fa, va)) <= tol);
  CHECK(max_rel(to_vec(g.at(b.id())), central_diff(fb, vb)) <= tol);
}

// Random scalar weights keep the reduction from hiding sign errors.
Tensor weigh(const Tensor& t, std::uint64_t seed) {
  return dot(t, Tensor::constant(t.shape(), random_values(t.numel(), seed)));
}

}  // namespace

TEST_CASE("elementwise and matmul values") {
  const Tensor a = Tensor::constant({2}, {1, 2});
  const Tensor b = Tensor::constant({2}, {3, 4});
  CHECK(to_vec(add(a, b)) == std::vector<double>{4, 6});
  CHECK(to_vec(a - b) == std::vector<double>{-2, -2});
  CHECK(to_vec(a * b) == std::vector<double>{3, 8});
  CHECK(to_vec(a * 2.0) == std::vector<double>{2, 4});

  const Tensor eye = Tensor::constant({2, 2}, {1, 0, 0, 1});
  const auto xs = random_values(2, 5);
  const Tensor x = Tensor::constant({2, 1}, xs);
  CHECK(to_vec(matmul(eye, x)) == xs);
}

TEST_CASE("shape mismatches are rejected with a diagnostic") {
  const Tensor a = Tensor::constant({2}, {1, 2});
  const Tensor b = Tensor::constant({3}, {1, 2, 3});
  CHECK_THROWS_AS(add(a, b), ShapeError);
  CHECK_THROWS_WITH(add(a, b), Catch::Matchers::ContainsSubstring("[2]"));
  CHECK_THROWS_AS(matmul(Tensor::zeros({2, 3}), Tensor::zeros({2, 3})), ShapeError);
  CHECK_THROWS_AS(Tensor::constant({2, 2}, {1, 2, 3}), ShapeError);
  CHECK_THROWS_AS(concat({Tensor::zeros({2, 1}), Tensor::zeros({3, 1})}, 1), ShapeError);
}

TEST_CASE("scalar broadcast") {
  const Tensor a = Tensor::constant({3}, {1, 2, 3});
  CHECK(to_vec(a + Tensor::scalar(1.0)) == std::vector<double>{2, 3, 4});
  CHECK(to_vec(Tensor::scalar(6.0) / a) == std::vector<double>{6, 3, 2});
}

TEST_CASE("basic gradients") {
  SECTION("x*x at 3 gives 6") {
    const Tensor x = Tensor::parameter({}, {3.0});
    CHECK(backward(x * x).at(x.id()).item() == 6.0);
  }
  SECTION("mean spreads 1/n") {
    const Tensor x = Tensor::parameter({5}, random_values(5, 1));
    const GradientMap g = backward(mean(x));
    for (double v : g.at(x.id()).values()) CHECK(v == Catch::Approx(0.2).epsilon(1e-15));
  }
  SECTION("non-scalar loss is rejected") {
    const Tensor x = Tensor::parameter({2}, {1, 2});
    CHECK_THROWS_AS(backward(x * 2.0), ShapeError);
  }
}

TEST_CASE("every primitive matches central differences") {
  const Shape m23{2, 3}, m32{3, 2};
  const auto a = random_values(6, 10);
  const auto b = random_values(6, 11);
  const auto pos = random_values(6, 12, 0.5, 2.0);

  check_binary([](const Tensor& x, const Tensor& y) { return weigh(x + y, 1); }, m23, a, m23, b);
  check_binary([](const Tensor& x, const Tensor& y) { return weigh(x - y, 2); }, m23, a, m23, b);
  check_binary([](const Tensor& x, const Tensor& y) { return weigh(x * y, 3); }, m23, a, m23, b);
  check_binary([](const Tensor& x, const Tensor& y) { return weigh(x / y, 4); }, m23, a, m23, pos);
  check_binary([](const Tensor& x, const Tensor& y) { return weigh(matmul(x, y), 5); }, m23, a, m32, b);
  check_binary([](const Tensor& x, const Tensor& y) { return dot(x, y); }, m23, a, m23, b);
  check_binary([](const Tensor& x, const Tensor& y) { return weigh(x * y, 6); }, m23, a, {}, {0.7});
  check_binary([](const Tensor& x, const Tensor& y) { return weigh(concat({x, y}, 0), 7); }, m23, a, m23, b);
  check_binary([](const Tensor& x, const Tensor& y) { return weigh(concat({x, y}, 1), 8); }, m23, a, m23, b);

  const auto unary = [&](const std::function<Tensor(const Tensor&)>& op, const std::vector<double>& v) {
    check_binary([&](const Tensor& x, const Tensor& y) { return weigh(op(x), 9) + sum(y); }, m23, v, {}, {0.0});
  };
  unary([](const Tensor& x) { return tanh(x); }, a);
  unary([](const Tensor& x) { return square(x); }, a);
  unary([](const Tensor& x) { return sqrt(x); }, pos);
  unary([](const Tensor& x) { return exp(x); }, a);
  unary([](const Tensor& x) { return -x; }, a);
  unary([](const Tensor& x) { return x * 3.0 + 1.0; }, a);
  unary([](const Tensor& x) { return row_sum(x); }, a);
  unary([](const Tensor& x) { return frobenius_sq(x); }, a);
  unary([](const Tensor& x) { return mean(x); }, a);
  unary([](const Tensor& x) {
          const std::vector<std::size_t> rows{1, 0, 1};
          return select_rows(x, rows);
        },
        a);
}

TEST_CASE("random three-layer composition") {
  const Shape w1s{3, 4}, w2s{4, 4}, w3s{4, 1};
  const auto x = Tensor::constant({5, 3}, random_values(15, 20));
  const auto v1 = random_values(12, 21), v2 = random_values(16, 22), v3 = random_values(4, 23);
  const auto net = [&](const Tensor& w1, const Tensor& w2, const Tensor& w3) {
    return mean(square(matmul(tanh(matmul(tanh(matmul(x, w1)), w2)), w3)));
  };
  const Tensor w1 = Tensor::parameter(w1s, v1), w2 = Tensor::parameter(w2s, v2), w3 = Tensor::parameter(w3s, v3);
  const GradientMap g = backward(net(w1, w2, w3));
  const auto f2 = [&](const std::vector<double>& v) {
    return net(Tensor::constant(w1s, v1), Tensor::constant(w2s, v), Tensor::constant(w3s, v3)).item();
  };
  const auto f1 = [&](const std::vector<double>& v) {
    return net(Tensor::constant(w1s, v), Tensor::constant(w2s, v2), Tensor::constant(w3s, v3)).item();
  };
  CHECK(max_rel(to_vec(g.at(w1.id())), central_diff(f1, v1)) <= 1e-6);
  CHECK(max_rel(to_vec(g.at(w2.id())), central_diff(f2, v2)) <= 1e-6);
}

TEST_CASE("stop_gradient") {
  const Tensor x = Tensor::parameter({3}, {1, 2, 3});
  const Tensor y = Tensor::parameter({3}, {4, 5, 6});
  const Tensor sx = stop_gradient(x);

  CHECK(to_vec(sx) == to_vec(x));
  CHECK_FALSE(sx.has_history());
  CHECK_FALSE(sx.requires_grad());
  CHECK(to_vec(stop_gradient(stop_gradient(x))) == to_vec(x));
  CHECK_FALSE(stop_gradient(x * y).has_history());

  const GradientMap g = backward(sum(sx * y));
  CHECK_FALSE(g.contains(x.id()));
  CHECK(to_vec(g.at(y.id())) == to_vec(x));

  CHECK(backward(sum(tanh(sx))).empty());
}

TEST_CASE("detach soundness on a diamond graph") {
  // loss = sum(a*b) + sum(a*c) with b = tanh(x), c = x*x. Detaching one edge
  // removes exactly that path's contribution.
  const auto xv = random_values(4, 30);
  const auto av = random_values(4, 31);
  const Tensor x = Tensor::parameter({4}, xv);
  const Tensor a = Tensor::constant({4}, av);

  const Tensor full = backward(sum(a * tanh(x)) + sum(a * (x * x))).at(x.id());
  const Tensor cut_b = backward(sum(a * stop_gradient(tanh(x))) + sum(a * (x * x))).at(x.id());
  const Tensor cut_c = backward(sum(a * tanh(x)) + sum(a * stop_gradient(x * x))).at(x.id());

  for (std::size_t i = 0; i < 4; ++i) {
    const double tb = av[i] * (1.0 - std::tanh(xv[i]) * std::tanh(xv[i]));
    const double tc = av[i] * 2.0 * xv[i];
    CHECK(full.values()[i] == Catch::Approx(tb + tc).epsilon(1e-14));
    CHECK(cut_b.values()[i] == Catch::Approx(tc).epsilon(1e-14));
    CHECK(cut_c.values()[i] == Catch::Approx(tb).epsilon(1e-14));
  }
}

TEST_CASE("constants record no history") {
  const Tensor a = Tensor::constant({2}, {1, 2});
  const Tensor r = tanh(a * a + 1.0);
  CHECK_FALSE(r.has_history());
  CHECK_FALSE(r.requires_grad());
  const Tensor p = Tensor::parameter({2}, {1, 2});
  CHECK((p * a).has_history());
}

TEST_CASE("gradients accumulate over shared subexpressions") {
  const Tensor x = Tensor::parameter({}, {1.5});
  const Tensor y = x * x;
  // d/dx (y + y*y) = 2x + 4x^3
  const double g = backward(y + y * y).at(x.id()).item();
  CHECK(g == Catch::Approx(2 * 1.5 + 4 * 1.5 * 1.5 * 1.5).epsilon(1e-14));
}
