// Copyright (c) 2026, The RATS Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <set>

#include "rats/rng.hpp"

using rats::Rng;

namespace {

// Reference generator written out longhand: splitmix finalizer over a
// Weyl counter keyed by hash(seed) ^ fnv1a(label).
std::uint64_t ref_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t ref_draw(std::uint64_t seed, const std::string& label, std::uint64_t index) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) h = (h ^ c) * 0x100000001b3ULL;
  const std::uint64_t key = ref_mix(ref_mix(seed) ^ h);
  return ref_mix(key + 0x9e3779b97f4a7c15ULL * (index + 1));
}

}  // namespace

TEST_CASE("fnv1a64 known vectors") {
  CHECK(rats::fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(rats::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("draws are a pure function of seed, label and index") {
  Rng r(42, "train/student/3");
  for (std::uint64_t i = 0; i < 100; ++i) CHECK(r.next_u64() == ref_draw(42, "train/student/3", i));
  CHECK(r.draws() == 100);
}

TEST_CASE("equal seeds and labels reproduce bitwise") {
  Rng a(7, "x"), b(7, "x");
  for (int i = 0; i < 1000; ++i) {
    const double na = a.normal(), nb = b.normal();
    CHECK(std::memcmp(&na, &nb, sizeof na) == 0);
  }
}

TEST_CASE("derived streams are named children") {
  const Rng root(9, "train");
  CHECK(root.derive("x1", 4).label() == "train/x1/4");
  CHECK(root.derive("cond").label() == "train/cond");
  Rng a = root.derive("student", 1), b = root.derive("teacher", 1), c = root.derive("student", 2);
  std::set<std::uint64_t> firsts{a.next_u64(), b.next_u64(), c.next_u64(), Rng(10, "train").next_u64()};
  CHECK(firsts.size() == 4);
  // Deriving does not advance the parent.
  Rng p(9, "train");
  (void)p.derive("y");
  CHECK(p.next_u64() == Rng(9, "train").next_u64());
}

TEST_CASE("uniform ranges and normal moments") {
  Rng r(3, "moments");
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    const double o = r.uniform_open();
    REQUIRE(o > 0.0);
    REQUIRE(o < 1.0);
    const double z = r.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.015);
}

TEST_CASE("below is in range and rejects zero") {
  Rng r(5, "below");
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 500; ++i) {
    const auto v = r.below(4);
    REQUIRE(v < 4);
    seen.insert(v);
  }
  CHECK(seen.size() == 4);
  CHECK_THROWS(r.below(0));
}
