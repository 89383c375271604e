// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tsgan/tensor.hpp"

namespace tsgan {

/// |analytic - numeric| / max(1, |analytic|, |numeric|).
double relative_error(double analytic, double numeric);

/// Builds a scalar from the given tensors. May itself call backward(..., true).
using ScalarFn = std::function<Tensor(std::span<const Tensor>)>;

/// Largest relative error between reverse-mode gradients of `f` and central
/// finite differences over every element of every input. Inputs are copied;
/// the originals are left untouched.
double max_gradient_error(const ScalarFn& f, std::span<const Tensor> inputs, double step = 1e-5);

struct GradcheckResult {
  std::string name;
  std::size_t cases = 0;
  double max_rel_error = 0.0;
  double tolerance = 0.0;

  bool passed() const { return max_rel_error < tolerance; }
};

struct GradcheckReport {
  std::vector<GradcheckResult> results;

  bool passed() const;
  double max_error() const;
};

/// First-order check of every primitive op on random small tensors
/// (entries in [-2, 2], dims <= 5), tolerance 1e-5.
GradcheckReport run_primitive_gradchecks(std::uint64_t seed, std::size_t cases_per_op = 100);

/// Gradient-of-gradient-norm compositions, tolerance 1e-4.
GradcheckReport run_second_order_gradchecks(std::uint64_t seed, std::size_t cases = 100);

}  // namespace tsgan
