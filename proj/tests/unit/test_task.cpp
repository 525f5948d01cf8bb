// Copyright (c) 2026, The RATS Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <cmath>

#include "rats/error.hpp"
#include "rats/task.hpp"

using namespace rats;

TEST_CASE("centers lie on the circle") {
  ToyTask t;
  const auto c = t.centers();
  REQUIRE(c.size() == t.conditions * t.dim);
  for (std::size_t k = 0; k < t.conditions; ++k) {
    CHECK(std::hypot(c[2 * k], c[2 * k + 1]) == Catch::Approx(t.radius).epsilon(1e-14));
    CHECK(t.nearest_center(std::span<const double>(c).subspan(2 * k, 2)) == k);
  }
}

TEST_CASE("data mixture proportions") {
  ToyTask t;
  Rng rng(1, "data");
  const Batch b = sample_data(t, 20000, rng);
  const auto c = t.centers();
  std::size_t near_mode = 0;
  std::vector<std::size_t> counts(t.conditions, 0);
  for (std::size_t r = 0; r < b.conditions.size(); ++r) {
    const std::size_t k = b.conditions[r];
    counts[k]++;
    const double dx = b.x0.at(r, 0) - c[2 * k], dy = b.x0.at(r, 1) - c[2 * k + 1];
    if (std::hypot(dx, dy) < 0.3) ++near_mode;
  }
  CHECK(static_cast<double>(near_mode) / 20000.0 == Catch::Approx(t.preferred_weight).margin(0.015));
  for (std::size_t n : counts) CHECK(static_cast<double>(n) / 20000.0 == Catch::Approx(0.25).margin(0.015));
}

TEST_CASE("sampling is reproducible") {
  ToyTask t;
  Rng a(3, "data"), b(3, "data");
  const Batch x = sample_data(t, 10, a), y = sample_data(t, 10, b);
  CHECK(x.conditions == y.conditions);
  CHECK(std::equal(x.x0.values().begin(), x.x0.values().end(), y.x0.values().begin()));
  Rng c(3, "n");
  CHECK(sample_normal(4, 2, c).shape() == Shape{4, 2});
}

TEST_CASE("task validation") {
  ToyTask t;
  t.conditions = 0;
  CHECK_THROWS_AS(t.validate(), ConfigError);
  ToyTask w;
  w.preferred_weight = 1.5;
  CHECK_THROWS_AS(w.validate(), ConfigError);
}
