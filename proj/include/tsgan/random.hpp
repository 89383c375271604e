// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#pragma once

#include <cstdint>
#include <random>

#include "tsgan/tensor.hpp"

namespace tsgan {

using Rng = std::mt19937_64;

/// Independent stream for a sub-task (trial, experiment arm). Plain XOR so the
/// mapping is reproducible from the manifest by hand.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) { return seed ^ stream; }

Tensor normal_tensor(Shape shape, Rng& rng, double mean = 0.0, double stddev = 1.0);
Tensor uniform_tensor(Shape shape, double lo, double hi, Rng& rng);

}  // namespace tsgan
