// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsgan/tensor.hpp"

namespace tsgan {

inline constexpr std::string_view kPrecipitation = "precipitation_mm";
inline constexpr std::string_view kTemperature = "temperature_c";
inline constexpr std::string_view kFlow = "flow";
inline constexpr std::size_t kWindowLength = 24;
inline constexpr std::int64_t kStepSeconds = 300;

// ---------------------------------------------------------------------------
// Series

struct Channel {
  std::string name;
  std::vector<double> values;
};

/// Multichannel series sampled every five minutes. Timestamps are UTC
/// seconds since the Unix epoch.
struct SeriesDataset {
  std::vector<std::int64_t> timestamps;
  std::vector<Channel> channels;

  std::size_t length() const { return timestamps.size(); }
  bool has_channel(std::string_view name) const;
  const Channel& channel(std::string_view name) const;
  Channel& channel(std::string_view name);
  std::vector<std::string> channel_names() const;

  /// Equal lengths, strictly uniform spacing, precipitation and flow >= 0.
  void validate() const;
  /// Rows [begin, begin + count).
  SeriesDataset rows(std::size_t begin, std::size_t count) const;
  /// Only the named channels, in the given order.
  SeriesDataset select(std::span<const std::string> names) const;
};

/// Reads `timestamp,precipitation_mm,temperature_c,flow` CSV. Throws ParseError
/// (with line number) for malformed or negative rows and FormatError for gaps
/// or non-uniform spacing.
SeriesDataset load_csv(const std::filesystem::path& path);
SeriesDataset parse_csv(std::istream& in);
void write_csv(const SeriesDataset& data, std::ostream& out);
void save_csv(const SeriesDataset& data, const std::filesystem::path& path);

/// "YYYY-MM-DDTHH:MM:SS" with optional trailing 'Z'. Returns nullopt when malformed.
std::optional<std::int64_t> parse_iso8601(std::string_view text);
std::string format_iso8601(std::int64_t seconds);

// ---------------------------------------------------------------------------
// Preprocessing

struct ChannelStats {
  std::string name;
  bool log_transform = false;
  double mean = 0.0;
  double stddev = 1.0;
};

struct PreprocStats {
  std::vector<ChannelStats> channels;

  const ChannelStats& find(std::string_view name) const;
  /// CRC32 over names, flags and the raw bits of mean/stddev.
  std::uint32_t checksum() const;
};

/// flow -> log1p(flow). Throws DomainError on negative flow.
SeriesDataset log_transform_flow(const SeriesDataset& data);
SeriesDataset inverse_log_transform_flow(const SeriesDataset& data);

struct Standardized {
  SeriesDataset data;
  PreprocStats stats;
};

/// Per channel x' = (x - mean) / stddev with population stddev. Reuses `stats`
/// when given (held-out data); otherwise computes them and throws
/// DegenerateChannelError for a zero-variance channel.
Standardized standardize(const SeriesDataset& data, const PreprocStats* stats = nullptr);
SeriesDataset inverse_standardize(const SeriesDataset& data, const PreprocStats& stats);

/// Selects `channels`, log-transforms flow, standardizes. The returned stats
/// carry the log flag for flow.
Standardized preprocess(const SeriesDataset& raw, std::span<const std::string> channels,
                        const PreprocStats* stats = nullptr);
SeriesDataset inverse_preprocess(const SeriesDataset& data, const PreprocStats& stats);

/// Maps one preprocessed value back to physical units.
double to_physical(double value, const ChannelStats& stats);

/// Channels the generator and forecaster work on.
std::vector<std::string> model_channels();

// ---------------------------------------------------------------------------
// Windows

enum class Provenance : std::uint8_t { Real = 0, Synthetic = 1, Oversampled = 2 };
std::string_view to_string(Provenance p);

struct WindowBatch {
  Tensor data;  // (count, steps, channels)
  std::vector<std::string> channels;
  std::vector<Provenance> provenance;  // one per window

  std::size_t count() const { return data.defined() ? data.dim(0) : 0; }
  std::size_t steps() const { return data.dim(1); }
  std::size_t channel_index(std::string_view name) const;
  /// Every value of one channel across all windows and steps.
  std::vector<double> channel_values(std::string_view name) const;
  /// Values of window `w`, channel `c`, one per step.
  std::vector<double> window_channel(std::size_t w, std::size_t c) const;

  WindowBatch subset(std::span<const std::size_t> indices) const;
  /// Windows of `other` appended after these; channel lists must match.
  WindowBatch concat(const WindowBatch& other) const;
  std::size_t count_of(Provenance p) const;
};

/// count = floor((N - window_len) / stride) + 1 contiguous slices, all tagged real.
WindowBatch make_windows(const SeriesDataset& data, std::size_t window_len = kWindowLength, std::size_t stride = 1);

/// Indices of windows whose `channel` has sample standard deviation above `threshold`.
std::vector<std::size_t> wet_window_indices(const WindowBatch& batch, std::string_view channel = kPrecipitation,
                                            double threshold = 1e-12);

/// Keeps windows whose `channel` has sample standard deviation above
/// `threshold`, preserving order.
WindowBatch filter_flat_windows(const WindowBatch& batch, std::string_view channel = kPrecipitation,
                                double threshold = 1e-12);

/// Per-channel mean over every window and step; throws SizeError when empty.
Tensor compute_start_token(const WindowBatch& batch);

/// Writes `window,provenance,step,<channels...>` rows.
void write_windows_csv(const WindowBatch& batch, std::ostream& out);
WindowBatch read_windows_csv(std::istream& in);

// ---------------------------------------------------------------------------
// Chronological split

struct SeriesSplit {
  SeriesDataset train;
  SeriesDataset test;
};

/// Leading rows yielding exactly `train_windows` stride-1 windows, trailing
/// rows yielding `test_windows`. The two regions do not overlap.
SeriesSplit split_chronological(const SeriesDataset& data, std::size_t train_windows, std::size_t test_windows,
                                std::size_t window_len = kWindowLength);

// ---------------------------------------------------------------------------
// Synthetic catchment

struct CatchmentConfig {
  std::size_t length = 100000;
  // Two-state rain chain: P(dry -> wet) and P(wet -> dry) per step.
  double storm_start_probability = 0.004;
  double storm_end_probability = 0.08;
  // Storm mean intensities are exponential with this mean (mm / 5 min);
  // step intensities are exponential around the storm mean.
  double mean_intensity_mm = 0.4;
  // Linear reservoir Q_t = alpha Q_{t-1} + beta P_t + B_t.
  double alpha = 0.92;
  double beta = 4.0;
  // Diurnal base inflow B_t = base_inflow * (1 + diurnal_amplitude * sin(...)).
  double base_inflow = 0.4;
  double diurnal_amplitude = 0.1;
  // Multiplicative log-normal measurement noise on flow (0 disables).
  double flow_noise = 0.02;
  double temperature_mean = 12.0;
  double temperature_amplitude = 5.0;
  std::int64_t start_time = 1496275200;  // 2017-06-01T00:00:00Z

  void validate() const;
};

SeriesDataset synth_catchment(const CatchmentConfig& config, std::uint64_t seed);

/// q[0] = q0 and q[t] = alpha q[t-1] + beta p[t] + b[t]. Throws ConfigError
/// unless 0 <= alpha < 1.
std::vector<double> linear_reservoir(std::span<const double> precipitation, std::span<const double> base_inflow,
                                     double alpha, double beta, double q0);

}  // namespace tsgan
