// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tsgan/data.hpp"
#include "tsgan/forecast.hpp"
#include "tsgan/gan.hpp"

namespace tsgan {

enum class ValueKind : std::uint8_t { Integer, Real, Choice, Path };

/// One accepted configuration key. Numeric bounds are inclusive unless
/// `exclusive_min` / `exclusive_max` is set.
struct KeySpec {
  std::string_view name;
  ValueKind kind;
  std::string_view default_value;
  double min = 0.0;
  double max = 0.0;
  bool exclusive_min = false;
  bool exclusive_max = false;
  std::vector<std::string_view> choices;
  std::string_view help;
};

/// Every key, sorted by name.
const std::vector<KeySpec>& config_schema();
const KeySpec* find_key(std::string_view name);

/// Flat `key = value` run configuration. Every key has a default; values are
/// validated and stored in canonical text form, so serialize -> parse is the
/// identity on any accepted config.
class RunConfig {
 public:
  RunConfig() = default;

  /// `key = value` lines, `#` comments, blank lines. ParseError for lines
  /// without '=' or repeated keys; ConfigError for unknown keys and invalid values.
  static RunConfig parse(std::istream& in);
  static RunConfig parse_text(std::string_view text);
  static RunConfig load(const std::filesystem::path& path);

  /// Validates and stores. ConfigError on an unknown key or a bad value.
  void set(std::string_view key, std::string_view value);
  /// "key=value" (as given on the command line).
  void set_assignment(std::string_view assignment);
  /// True when the key was set explicitly rather than defaulted.
  bool is_set(std::string_view key) const;

  std::string get(std::string_view key) const;
  std::int64_t get_int(std::string_view key) const;
  std::size_t get_size(std::string_view key) const;
  double get_real(std::string_view key) const;
  std::uint64_t seed() const { return static_cast<std::uint64_t>(get_int("seed")); }

  /// Every key (defaults included), sorted, one `key = value` per line.
  std::string serialize() const;
  /// CRC32 of serialize(), as 8 lowercase hex digits.
  std::string hash() const;

  CatchmentConfig catchment_config() const;
  GanTrainConfig gan_config() const;
  ForecastConfig forecast_config() const;
  ExperimentConfig experiment_config() const;

  friend bool operator==(const RunConfig& a, const RunConfig& b) { return a.serialize() == b.serialize(); }

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

/// Canonical text of a double: shortest form that parses back to the same bits.
std::string format_real(double value);

/// Resolves the run seed: an explicit config value, else TSGAN_SEED, else 0.
/// ConfigError when TSGAN_SEED is not an unsigned integer.
std::uint64_t resolve_seed(const RunConfig& config);

}  // namespace tsgan
