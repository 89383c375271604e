// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#include <zlib.h>

#include <cmath>
#include <cstring>

#include "tsgan/data.hpp"
#include "tsgan/errors.hpp"

namespace tsgan {

const ChannelStats& PreprocStats::find(std::string_view name) const {
  for (const auto& c : channels) {
    if (c.name == name) return c;
  }
  throw ContractError("no preprocessing stats for channel '" + std::string(name) + "'");
}

std::uint32_t PreprocStats::checksum() const {
  uLong crc = crc32(0L, Z_NULL, 0);
  for (const auto& c : channels) {
    crc = crc32(crc, reinterpret_cast<const Bytef*>(c.name.data()), static_cast<uInt>(c.name.size()));
    const unsigned char flag = c.log_transform ? 1 : 0;
    crc = crc32(crc, &flag, 1);
    unsigned char bits[16];
    std::memcpy(bits, &c.mean, 8);
    std::memcpy(bits + 8, &c.stddev, 8);
    crc = crc32(crc, bits, 16);
  }
  return static_cast<std::uint32_t>(crc);
}

std::vector<std::string> model_channels() { return {std::string(kPrecipitation), std::string(kFlow)}; }

SeriesDataset log_transform_flow(const SeriesDataset& data) {
  SeriesDataset out = data;
  for (double& v : out.channel(kFlow).values) {
    if (v < 0.0) throw DomainError("log transform: negative flow " + std::to_string(v));
    v = std::log1p(v);
  }
  return out;
}

SeriesDataset inverse_log_transform_flow(const SeriesDataset& data) {
  SeriesDataset out = data;
  for (double& v : out.channel(kFlow).values) v = std::expm1(v);
  return out;
}

Standardized standardize(const SeriesDataset& data, const PreprocStats* stats) {
  Standardized result{data, {}};
  for (auto& channel : result.data.channels) {
    ChannelStats cs;
    if (stats != nullptr) {
      cs = stats->find(channel.name);
    } else {
      cs.name = channel.name;
      const auto n = static_cast<double>(channel.values.size());
      if (channel.values.empty()) throw SizeError("standardize: empty channel '" + channel.name + "'");
      double mean = 0.0;
      for (double v : channel.values) mean += v;
      mean /= n;
      double var = 0.0;
      for (double v : channel.values) var += (v - mean) * (v - mean);
      var /= n;
      if (!(var > 0.0)) throw DegenerateChannelError("channel '" + channel.name + "' has zero variance");
      cs.mean = mean;
      cs.stddev = std::sqrt(var);
    }
    for (double& v : channel.values) v = (v - cs.mean) / cs.stddev;
    result.stats.channels.push_back(cs);
  }
  return result;
}

SeriesDataset inverse_standardize(const SeriesDataset& data, const PreprocStats& stats) {
  SeriesDataset out = data;
  for (auto& channel : out.channels) {
    const auto& cs = stats.find(channel.name);
    for (double& v : channel.values) v = v * cs.stddev + cs.mean;
  }
  return out;
}

Standardized preprocess(const SeriesDataset& raw, std::span<const std::string> channels, const PreprocStats* stats) {
  SeriesDataset selected = raw.select(channels);
  const bool log_flow = selected.has_channel(kFlow) && (stats == nullptr || stats->find(kFlow).log_transform);
  if (log_flow) selected = log_transform_flow(selected);
  Standardized result = standardize(selected, stats);
  if (stats == nullptr) {
    for (auto& cs : result.stats.channels) cs.log_transform = cs.name == kFlow;
  }
  return result;
}

SeriesDataset inverse_preprocess(const SeriesDataset& data, const PreprocStats& stats) {
  SeriesDataset out = inverse_standardize(data, stats);
  for (auto& channel : out.channels) {
    if (stats.find(channel.name).log_transform) {
      for (double& v : channel.values) v = std::expm1(v);
    }
  }
  return out;
}

double to_physical(double value, const ChannelStats& stats) {
  const double x = value * stats.stddev + stats.mean;
  return stats.log_transform ? std::expm1(x) : x;
}

}  // namespace tsgan
