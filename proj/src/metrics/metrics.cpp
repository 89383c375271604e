// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#include "tsgan/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "tsgan/errors.hpp"

namespace tsgan {

Histogram histogram_estimate(std::span<const double> values, std::size_t bins, double lo, double hi) {
  if (values.empty()) throw SizeError("histogram of an empty sample");
  if (bins < 2) throw ContractError("histogram needs at least 2 bins");
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) throw ContractError("bad histogram range");
  Histogram h;
  h.edges.resize(bins + 1);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = lo + width * static_cast<double>(i);
  h.edges.back() = hi;
  h.counts.assign(bins, 0);
  for (double v : values) {
    if (!(v >= lo && v <= hi)) throw ContractError("value " + std::to_string(v) + " outside histogram range");
    std::size_t bin = 0;
    if (width > 0.0) {
      // Snap to the stored edges so a value equal to an edge lands in the bin it opens.
      bin = std::min(bins - 1, static_cast<std::size_t>((v - lo) / width));
      while (bin + 1 < bins && v >= h.edges[bin + 1]) ++bin;
      while (bin > 0 && v < h.edges[bin]) --bin;
    }
    ++h.counts[bin];
  }
  const double denom = static_cast<double>(values.size()) + static_cast<double>(bins) * kHistogramEpsilon;
  h.probabilities.resize(bins);
  for (std::size_t i = 0; i < bins; ++i) h.probabilities[i] = (static_cast<double>(h.counts[i]) + kHistogramEpsilon) / denom;
  return h;
}

double kld(const Histogram& p, const Histogram& q) {
  if (p.edges != q.edges || p.probabilities.size() != q.probabilities.size()) {
    throw ContractError("kld: histograms have different bin edges");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < p.probabilities.size(); ++i) {
    const double pi = p.probabilities[i];
    const double qi = q.probabilities[i];
    if (pi > 0.0) total += pi * std::log(pi / qi);
  }
  return total;
}

double jsd_points(std::span<const double> a, std::span<const double> b, std::size_t bins) {
  if (a.empty() || b.empty()) throw SizeError("jsd of an empty sample");
  const auto [amin, amax] = std::minmax_element(a.begin(), a.end());
  const auto [bmin, bmax] = std::minmax_element(b.begin(), b.end());
  const double lo = std::min(*amin, *bmin);
  const double hi = std::max(*amax, *bmax);
  const Histogram p = histogram_estimate(a, bins, lo, hi);
  const Histogram q = histogram_estimate(b, bins, lo, hi);
  Histogram m = p;
  for (std::size_t i = 0; i < bins; ++i) m.probabilities[i] = 0.5 * (p.probabilities[i] + q.probabilities[i]);
  return 0.5 * kld(p, m) + 0.5 * kld(q, m);
}

JsdReport jsd(const WindowBatch& real, const WindowBatch& fake, std::size_t bins) {
  if (real.channels != fake.channels) throw ContractError("jsd: batches have different channels");
  if (real.count() == 0 || fake.count() == 0) throw SizeError("jsd of an empty batch");
  JsdReport report;
  report.channels = real.channels;
  for (const auto& name : real.channels) {
    report.per_channel.push_back(jsd_points(real.channel_values(name), fake.channel_values(name), bins));
  }
  double sum = 0.0;
  for (double v : report.per_channel) sum += v;
  report.mean = sum / static_cast<double>(report.per_channel.size());
  return report;
}

double mae(std::span<const double> pred, std::span<const double> obs) {
  if (pred.size() != obs.size()) {
    throw ShapeError("mae: " + std::to_string(pred.size()) + " predictions for " + std::to_string(obs.size()) +
                     " observations");
  }
  if (pred.empty()) throw SizeError("mae of an empty sample");
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) total += std::abs(pred[i] - obs[i]);
  return total / static_cast<double>(pred.size());
}

double quantile(std::span<const double> values, double q) {
  if (values.empty()) throw SizeError("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw ContractError("quantile must lie in [0, 1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(i);
  return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

PeakMetrics peak_event_metrics_at(std::span<const double> pred, std::span<const double> obs, double threshold) {
  PeakMetrics m;
  m.mae = mae(pred, obs);
  m.threshold = threshold;
  double peak_abs = 0.0, peak_signed = 0.0, dry_abs = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const double err = pred[i] - obs[i];
    if (obs[i] > threshold) {
      ++m.peak_count;
      peak_abs += std::abs(err);
      peak_signed += err;
    } else {
      ++m.dry_count;
      dry_abs += std::abs(err);
    }
  }
  if (m.peak_count > 0) {
    m.peak_mae = peak_abs / static_cast<double>(m.peak_count);
    m.peak_bias = peak_signed / static_cast<double>(m.peak_count);
  }
  if (m.dry_count > 0) m.dry_mae = dry_abs / static_cast<double>(m.dry_count);
  return m;
}

PeakMetrics peak_event_metrics(std::span<const double> pred, std::span<const double> obs,
                               double flow_threshold_quantile) {
  if (obs.empty()) throw SizeError("peak metrics of an empty sample");
  return peak_event_metrics_at(pred, obs, quantile(obs, flow_threshold_quantile));
}

}  // namespace tsgan
