// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#include <cmath>
#include <numbers>
#include <random>

#include "tsgan/data.hpp"
#include "tsgan/errors.hpp"
#include "tsgan/random.hpp"

namespace tsgan {

void CatchmentConfig::validate() const {
  if (length == 0) throw ConfigError("catchment length must be positive");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError("reservoir alpha must lie in [0, 1), got " + std::to_string(alpha));
  if (!(beta >= 0.0)) throw ConfigError("reservoir beta must be non-negative");
  auto probability = [](double p, const char* name) {
    if (!(p > 0.0 && p <= 1.0)) throw ConfigError(std::string(name) + " must lie in (0, 1]");
  };
  probability(storm_start_probability, "storm_start_probability");
  probability(storm_end_probability, "storm_end_probability");
  if (!(mean_intensity_mm > 0.0)) throw ConfigError("mean_intensity_mm must be positive");
  if (!(base_inflow >= 0.0)) throw ConfigError("base_inflow must be non-negative");
  // Keeps B_t >= 0.
  if (!(diurnal_amplitude >= 0.0 && diurnal_amplitude <= 1.0)) throw ConfigError("diurnal_amplitude must lie in [0, 1]");
  if (!(flow_noise >= 0.0)) throw ConfigError("flow_noise must be non-negative");
}

std::vector<double> linear_reservoir(std::span<const double> precipitation, std::span<const double> base_inflow,
                                     double alpha, double beta, double q0) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError("reservoir alpha must lie in [0, 1), got " + std::to_string(alpha));
  if (precipitation.size() != base_inflow.size()) throw ShapeError("precipitation and base inflow differ in length");
  std::vector<double> q(precipitation.size());
  if (q.empty()) return q;
  q[0] = q0;
  for (std::size_t t = 1; t < q.size(); ++t) q[t] = alpha * q[t - 1] + beta * precipitation[t] + base_inflow[t];
  return q;
}

SeriesDataset synth_catchment(const CatchmentConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rain_rng(derive_seed(seed, 1));
  Rng noise_rng(derive_seed(seed, 2));
  Rng temp_rng(derive_seed(seed, 3));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> storm_mean(1.0 / config.mean_intensity_mm);
  std::normal_distribution<double> normal(0.0, 1.0);

  const std::size_t n = config.length;
  SeriesDataset data;
  data.timestamps.resize(n);
  std::vector<double> rain(n, 0.0), base(n), temperature(n);

  bool wet = false;
  double intensity = 0.0;
  double temp_anomaly = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const std::int64_t ts = config.start_time + static_cast<std::int64_t>(t) * kStepSeconds;
    data.timestamps[t] = ts;
    if (wet) {
      if (unit(rain_rng) < config.storm_end_probability) wet = false;
    } else if (unit(rain_rng) < config.storm_start_probability) {
      wet = true;
      intensity = storm_mean(rain_rng);
    }
    if (wet) rain[t] = std::exponential_distribution<double>(1.0 / intensity)(rain_rng);

    const double phase = 2.0 * std::numbers::pi * static_cast<double>(((ts % 86400) + 86400) % 86400) / 86400.0;
    base[t] = config.base_inflow * (1.0 + config.diurnal_amplitude * std::sin(phase));
    // AR(1) weather anomaly on top of the diurnal cycle.
    temp_anomaly = 0.999 * temp_anomaly + 0.05 * normal(temp_rng);
    temperature[t] = config.temperature_mean - config.temperature_amplitude * std::cos(phase) + temp_anomaly;
  }

  const double q0 = config.base_inflow / (1.0 - config.alpha);
  std::vector<double> flow = linear_reservoir(rain, base, config.alpha, config.beta, q0);
  if (config.flow_noise > 0.0) {
    for (double& q : flow) q *= std::exp(config.flow_noise * normal(noise_rng));
  }

  data.channels = {{std::string(kPrecipitation), std::move(rain)},
                   {std::string(kTemperature), std::move(temperature)},
                   {std::string(kFlow), std::move(flow)}};
  return data;
}

}  // namespace tsgan
