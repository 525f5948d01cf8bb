// Copyright (c) 2026, The RATS Authors
// SPDX-License-Identifier: Apache-2.0

#include "rats/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "rats/rng.hpp"

namespace rats {

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-12});
  return std::abs(analytic - numeric) / denom;
}

GradCheckResult grad_check(const ScalarFn& f, const std::vector<Tensor>& params, double eps,
                           std::size_t n_probes, std::uint64_t probe_seed) {
  if (!(eps > 0.0)) throw std::invalid_argument("grad_check: eps must be positive");
  GradCheckResult result;

  const Tensor loss = f(params);
  if (!std::isfinite(loss.item())) {
    result.finite = false;
    result.failure = "non-finite loss at the unperturbed point";
    return result;
  }
  const GradientMap grads = backward(loss);

  // Flat (param, index) coordinates.
  std::vector<std::pair<std::size_t, std::size_t>> coords;
  for (std::size_t p = 0; p < params.size(); ++p)
    for (std::size_t j = 0; j < params[p].numel(); ++j) coords.emplace_back(p, j);
  if (n_probes < coords.size()) {
    Rng rng(probe_seed, "grad_check");
    for (std::size_t i = 0; i < n_probes; ++i) {
      const std::size_t k = i + rng.below(coords.size() - i);
      std::swap(coords[i], coords[k]);
    }
    coords.resize(n_probes);
  }

  std::vector<Tensor> probe(params.size());
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto v = params[p].values();
    probe[p] = Tensor::constant(params[p].shape(), std::vector<double>(v.begin(), v.end()));
  }
  auto eval_at = [&](std::size_t p, std::size_t j, double delta) {
    auto v = params[p].values();
    std::vector<double> shifted(v.begin(), v.end());
    shifted[j] += delta;
    const Tensor saved = probe[p];
    probe[p] = Tensor::constant(params[p].shape(), std::move(shifted));
    const double out = f(probe).item();
    probe[p] = saved;
    return out;
  };

  for (auto [p, j] : coords) {
    const double plus = eval_at(p, j, eps);
    const double minus = eval_at(p, j, -eps);
    if (!std::isfinite(plus) || !std::isfinite(minus)) {
      result.finite = false;
      result.failure = "non-finite loss when perturbing param " + std::to_string(p) +
                       " coordinate " + std::to_string(j);
      return result;
    }
    const double numeric = (plus - minus) / (2.0 * eps);
    const Tensor* g = grads.find(params[p].id());
    const double analytic = g ? g->values()[j] : 0.0;
    const double err = (analytic == 0.0 && numeric == 0.0) ? 0.0 : relative_error(analytic, numeric);
    ++result.probes;
    if (err > result.max_rel_error || result.probes == 1) {
      result.max_rel_error = std::max(result.max_rel_error, err);
      if (err >= result.max_rel_error) {
        result.worst_param = p;
        result.worst_index = j;
        result.worst_analytic = analytic;
        result.worst_numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace rats
