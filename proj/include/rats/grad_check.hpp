// Copyright (c) 2026, The RATS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rats/tensor.hpp"

namespace rats {

/// Scalar function of a parameter list. It is called once with the
/// trainable leaves (for the analytic gradient) and then repeatedly with
/// perturbed constant copies, so it must not capture the leaves itself.
using ScalarFn = std::function<Tensor(const std::vector<Tensor>& params)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_param = 0;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t probes = 0;
  /// False when a loss evaluation was non-finite.
  bool finite = true;
  std::string failure;
};

/// Central-difference comparison on `n_probes` coordinates drawn without
/// replacement (every coordinate when `n_probes` covers them all). Relative
/// error uses max(|analytic|, |numeric|, 1e-12) as denominator.
GradCheckResult grad_check(const ScalarFn& f, const std::vector<Tensor>& params, double eps,
                           std::size_t n_probes, std::uint64_t probe_seed = 0);

double relative_error(double analytic, double numeric);

}  // namespace rats
