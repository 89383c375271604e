// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsgan/data.hpp"

namespace tsgan {

inline constexpr double kHistogramEpsilon = 1e-10;
inline constexpr std::size_t kDefaultBins = 50;

struct Histogram {
  std::vector<double> edges;  // bins + 1 equal-width edges
  std::vector<std::size_t> counts;
  std::vector<double> probabilities;  // (count + eps) / (total + bins * eps)

  std::size_t bins() const { return counts.size(); }
};

/// Equal-width histogram over [lo, hi]. Values equal to hi land in the last
/// bin; values outside the range are a ContractError. When lo == hi every
/// value lands in bin 0.
Histogram histogram_estimate(std::span<const double> values, std::size_t bins, double lo, double hi);

/// Natural-log KL divergence over matching edges.
double kld(const Histogram& p, const Histogram& q);

/// Jensen-Shannon divergence between two point sets, binned over their joint
/// min/max.
double jsd_points(std::span<const double> a, std::span<const double> b, std::size_t bins = kDefaultBins);

struct JsdReport {
  std::vector<std::string> channels;
  std::vector<double> per_channel;
  double mean = 0.0;
};

/// Per-channel JSD of the flattened values of two batches, plus their mean.
JsdReport jsd(const WindowBatch& real, const WindowBatch& fake, std::size_t bins = kDefaultBins);

double mae(std::span<const double> pred, std::span<const double> obs);

/// Linear-interpolation quantile (numpy's default) of an unsorted sample.
double quantile(std::span<const double> values, double q);

struct PeakMetrics {
  double threshold = 0.0;
  std::size_t peak_count = 0;
  std::size_t dry_count = 0;
  double mae = 0.0;
  std::optional<double> peak_mae;   // undefined when no step is a peak
  std::optional<double> peak_bias;  // mean(pred - obs) over peaks
  std::optional<double> dry_mae;
};

/// Steps with obs above `threshold` are peaks, the rest dry.
PeakMetrics peak_event_metrics_at(std::span<const double> pred, std::span<const double> obs, double threshold);
/// Threshold at the given quantile of obs.
PeakMetrics peak_event_metrics(std::span<const double> pred, std::span<const double> obs,
                               double flow_threshold_quantile = 0.95);

}  // namespace tsgan
