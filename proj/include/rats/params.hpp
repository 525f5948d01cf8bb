// Copyright (c) 2026, The RATS Authors
// SPDX-License-Identifier: Apache-2.0
//
// Flat parameter storage with a named layout, and the checkpoint format.
//
// A checkpoint is one line of JSON (the header) terminated by '\n', followed
// by the raw little-endian float64 values in layout order.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rats/tensor.hpp"

namespace rats {

struct ParamEntry {
  std::string name;
  std::size_t offset = 0;
  Shape shape;

  std::size_t size() const { return numel_of(shape); }
  bool operator==(const ParamEntry&) const = default;
};

class ParamLayout {
 public:
  void add(std::string name, Shape shape);
  const std::vector<ParamEntry>& entries() const { return entries_; }
  std::size_t total() const { return total_; }
  std::size_t size() const { return entries_.size(); }
  const ParamEntry& entry(const std::string& name) const;
  bool operator==(const ParamLayout&) const = default;

 private:
  std::vector<ParamEntry> entries_;
  std::size_t total_ = 0;
};

class ParamSet {
 public:
  ParamSet() = default;
  explicit ParamSet(ParamLayout layout);
  ParamSet(ParamLayout layout, std::vector<double> values);

  const ParamLayout& layout() const { return layout_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  std::span<const double> view(const std::string& name) const;
  std::span<double> view(const std::string& name);
  std::size_t size() const { return values_.size(); }

  /// One tensor per layout entry; trainable leaves or constants.
  std::vector<Tensor> bind(bool trainable) const;

  /// Flattens per-entry gradients for `bound` (from bind(true)) in layout
  /// order; leaves without a gradient entry contribute zeros.
  std::vector<double> gather_grads(const std::vector<Tensor>& bound, const GradientMap& grads) const;

 private:
  ParamLayout layout_;
  std::vector<double> values_;
};

struct CheckpointHeader {
  std::string kind;  // "backbone" or "adapter"
  std::size_t dim = 0;
  std::size_t conditions = 0;
  std::vector<std::size_t> hidden;
  std::size_t adapter_rank = 0;
  std::string config_hash;
  std::uint64_t seed = 0;
};

struct Checkpoint {
  CheckpointHeader header;
  ParamSet params;
};

void save_checkpoint(const std::filesystem::path& path, const CheckpointHeader& header,
                     const ParamSet& params);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace rats
