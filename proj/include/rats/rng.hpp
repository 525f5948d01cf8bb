// Copyright (c) 2026, The RATS Authors
// SPDX-License-Identifier: Apache-2.0
//
// Counter-based random streams keyed by (seed, label).
//
// A stream's k-th draw is a pure function of (seed, label, k), so streams can
// be created anywhere, in any order, and still reproduce the same numbers.
// Child streams are named by appending "/<child>" to the parent label.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace rats {

class Rng {
 public:
  Rng(std::uint64_t seed, std::string label);

  std::uint64_t seed() const { return seed_; }
  const std::string& label() const { return label_; }
  std::uint64_t draws() const { return counter_; }

  Rng derive(std::string_view child) const;
  Rng derive(std::string_view child, std::uint64_t index) const;

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform in (0, 1): never returns 0.
  double uniform_open();
  /// Standard normal via Box-Muller; draws come in cached pairs.
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  std::vector<double> normals(std::size_t n);

 private:
  std::uint64_t seed_;
  std::string label_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace rats
