// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#include "tsgan/config.hpp"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "tsgan/errors.hpp"

namespace tsgan {
namespace {

constexpr double kMaxCount = 1e9;
constexpr double kMaxSeed = 9007199254740992.0;  // 2^53, exact as a double

KeySpec integer(std::string_view name, std::string_view def, double lo, double hi, std::string_view help) {
  return {name, ValueKind::Integer, def, lo, hi, false, false, {}, help};
}

KeySpec real(std::string_view name, std::string_view def, double lo, double hi, bool open_lo, bool open_hi,
             std::string_view help) {
  return {name, ValueKind::Real, def, lo, hi, open_lo, open_hi, {}, help};
}

KeySpec choice(std::string_view name, std::string_view def, std::vector<std::string_view> options,
               std::string_view help) {
  return {name, ValueKind::Choice, def, 0.0, 0.0, false, false, std::move(options), help};
}

KeySpec path(std::string_view name, std::string_view help) {
  return {name, ValueKind::Path, "", 0.0, 0.0, false, false, {}, help};
}

std::vector<KeySpec> build_schema() {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<KeySpec> keys = {
      integer("seed", "0", 0, kMaxSeed, "master seed; TSGAN_SEED is used when unset"),

      integer("data.length", "100000", kWindowLength, kMaxCount, "synthetic series length (5-minute steps)"),
      real("data.storm_start_probability", "0.004", 0, 1, true, false, "P(dry -> wet) per step"),
      real("data.storm_end_probability", "0.08", 0, 1, true, false, "P(wet -> dry) per step"),
      real("data.mean_intensity_mm", "0.4", 0, inf, true, true, "mean storm intensity, mm per step"),
      real("data.alpha", "0.92", 0, 1, false, true, "reservoir recession coefficient"),
      real("data.beta", "4", 0, inf, true, true, "reservoir rain gain"),
      real("data.base_inflow", "0.4", 0, inf, false, true, "mean dry-weather inflow"),
      real("data.diurnal_amplitude", "0.1", 0, 1, false, false, "relative diurnal swing of the base inflow"),
      real("data.flow_noise", "0.02", 0, 1, false, false, "log-normal flow noise sigma"),
      real("data.temperature_mean", "12", -50, 50, false, false, "mean air temperature"),
      real("data.temperature_amplitude", "5", 0, 30, false, false, "diurnal temperature amplitude"),

      integer("split.train_windows", "38000", 1, kMaxCount, "leading windows used for training"),
      integer("split.test_windows", "13000", 1, kMaxCount, "trailing windows held out for testing"),

      integer("gan.steps", "2000", 0, kMaxCount, "generator steps"),
      real("gan.lambda_gp", "10", 0, inf, false, true, "gradient penalty coefficient"),
      integer("gan.critic_iters", "5", 1, 100, "critic updates per generator update"),
      integer("gan.batch_size", "64", 1, 65536, "windows per update"),
      integer("gan.generator_layers", "3", 1, 4, "GRU layers in G"),
      integer("gan.generator_hidden", "450", 32, 512, "GRU hidden size in G"),
      integer("gan.critic_layers", "3", 1, 4, "GRU layers in D"),
      integer("gan.critic_hidden", "120", 32, 512, "GRU hidden size in D"),
      real("gan.generator_lr", "0.0001", 0, 1, true, false, "Adam learning rate of G"),
      real("gan.critic_lr", "0.0001", 0, 1, true, false, "Adam learning rate of D"),
      real("gan.beta1", "0", 0, 1, false, true, "Adam beta1 of G and D"),
      real("gan.beta2", "0.9", 0, 1, false, true, "Adam beta2 of G and D"),
      integer("gan.eval_every", "100", 0, kMaxCount, "generator steps between JSD evaluations (0 = never)"),
      integer("gan.eval_samples", "512", 1, 1e7, "generated windows per JSD evaluation"),
      integer("gan.jsd_bins", "50", 2, 100000, "histogram bins of the JSD estimate"),
      integer("gan.checkpoint_every", "0", 0, kMaxCount, "generator steps between checkpoints (0 = final only)"),

      integer("gradcheck.cases", "100", 1, 100000, "random cases per op in gradcheck"),

      integer("generate.count", "8000", 1, 1e8, "windows written by generate"),

      choice("forecast.cell", "lstm", {"lstm", "gru"}, "recurrent cell of the forecaster"),
      integer("forecast.layers", "2", 1, 4, "recurrent layers"),
      integer("forecast.hidden", "64", 1, 512, "hidden units per layer"),
      integer("forecast.batch_size", "64", 1, 65536, "windows per update"),
      integer("forecast.max_epochs", "30", 1, 100000, "epoch limit"),
      integer("forecast.patience", "5", 1, 100000, "epochs without validation improvement before stopping"),
      real("forecast.validation_fraction", "0.1", 0, 0.5, true, false, "trailing share of train windows held out"),
      real("forecast.lr", "0.001", 0, 1, true, false, "Adam learning rate"),
      real("forecast.beta1", "0.9", 0, 1, false, true, "Adam beta1"),
      real("forecast.beta2", "0.999", 0, 1, false, true, "Adam beta2"),
      choice("forecast.augment", "none", {"none", "oversample", "gan"}, "training set balancing"),
      integer("forecast.added_windows", "8000", 0, 1e8, "windows added by oversample or gan augmentation"),
      real("forecast.peak_quantile", "0.95", 0, 1, true, true, "observed-flow quantile separating peaks"),

      integer("tune.trials", "9", 1, 10000, "sampled configurations"),
      integer("tune.rungs", "2", 1, 20, "pruning rounds, each keeping the best third"),
      integer("tune.max_layers", "4", 1, 4, "upper layer bound of the search space"),
      integer("tune.max_hidden", "512", 32, 512, "upper hidden-size bound of the search space"),
      integer("tune.budget", "4500", 1, 1e12, "total generator steps across all trials"),

      path("path.data", "input series CSV"),
      path("path.gan_checkpoint", "GAN checkpoint for generate and gan augmentation"),
      path("path.forecast_checkpoint", "forecaster checkpoint for evaluate"),
  };
  std::sort(keys.begin(), keys.end(), [](const KeySpec& a, const KeySpec& b) { return a.name < b.name; });
  return keys;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool in_bounds(const KeySpec& spec, double v) {
  const bool lo_ok = spec.exclusive_min ? v > spec.min : v >= spec.min;
  const bool hi_ok = spec.exclusive_max ? v < spec.max : v <= spec.max;
  return lo_ok && hi_ok;
}

std::string bounds_text(const KeySpec& spec) {
  return std::string(spec.exclusive_min ? "(" : "[") + format_real(spec.min) + ", " + format_real(spec.max) +
         (spec.exclusive_max ? ")" : "]");
}

/// Validated canonical form of `value` for `spec`.
std::string canonical(const KeySpec& spec, std::string_view raw) {
  const std::string_view value = trim(raw);
  const std::string key(spec.name);
  switch (spec.kind) {
    case ValueKind::Integer: {
      std::int64_t v = 0;
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
        throw ConfigError(key + ": expected an integer, got '" + std::string(value) + "'");
      }
      if (!in_bounds(spec, static_cast<double>(v))) {
        throw ConfigError(key + ": " + std::to_string(v) + " outside " + bounds_text(spec));
      }
      return std::to_string(v);
    }
    case ValueKind::Real: {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (value.empty() || ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(v)) {
        throw ConfigError(key + ": expected a finite number, got '" + std::string(value) + "'");
      }
      if (!in_bounds(spec, v)) throw ConfigError(key + ": " + format_real(v) + " outside " + bounds_text(spec));
      return format_real(v);
    }
    case ValueKind::Choice: {
      if (std::find(spec.choices.begin(), spec.choices.end(), value) == spec.choices.end()) {
        std::string options;
        for (const auto c : spec.choices) options += (options.empty() ? "" : "|") + std::string(c);
        throw ConfigError(key + ": expected one of " + options + ", got '" + std::string(value) + "'");
      }
      return std::string(value);
    }
    case ValueKind::Path:
      if (value.find_first_of("\n#") != std::string_view::npos) {
        throw ConfigError(key + ": paths may not contain newlines or '#'");
      }
      return std::string(value);
  }
  throw ConfigError(key + ": unsupported kind");
}

const KeySpec& require_key(std::string_view name) {
  const KeySpec* spec = find_key(name);
  if (spec == nullptr) throw ConfigError("unknown config key '" + std::string(name) + "'");
  return *spec;
}

}  // namespace

const std::vector<KeySpec>& config_schema() {
  static const std::vector<KeySpec> schema = build_schema();
  return schema;
}

const KeySpec* find_key(std::string_view name) {
  const auto& schema = config_schema();
  const auto it = std::lower_bound(schema.begin(), schema.end(), name,
                                   [](const KeySpec& s, std::string_view n) { return s.name < n; });
  return it != schema.end() && it->name == name ? &*it : nullptr;
}

std::string format_real(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general);
  (void)ec;
  return std::string(buf, ptr);
}

RunConfig RunConfig::parse(std::istream& in) {
  RunConfig config;
  std::set<std::string, std::less<>> seen;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view text = line;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ParseError(number, "expected 'key = value'");
    const std::string key(trim(text.substr(0, eq)));
    if (key.empty()) throw ParseError(number, "empty key");
    if (!seen.insert(key).second) throw ParseError(number, "duplicate key '" + key + "'");
    try {
      config.set(key, text.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(number) + ": " + e.what());
    }
  }
  return config;
}

RunConfig RunConfig::parse_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse(in);
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse(in);
}

void RunConfig::set(std::string_view key, std::string_view value) {
  const KeySpec& spec = require_key(key);
  values_.insert_or_assign(std::string(key), canonical(spec, value));
}

void RunConfig::set_assignment(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
  set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

bool RunConfig::is_set(std::string_view key) const {
  require_key(key);
  return values_.find(key) != values_.end();
}

std::string RunConfig::get(std::string_view key) const {
  const KeySpec& spec = require_key(key);
  const auto it = values_.find(key);
  return it != values_.end() ? it->second : std::string(spec.default_value);
}

std::int64_t RunConfig::get_int(std::string_view key) const {
  if (require_key(key).kind != ValueKind::Integer) throw ContractError(std::string(key) + " is not an integer key");
  return std::stoll(get(key));
}

std::size_t RunConfig::get_size(std::string_view key) const { return static_cast<std::size_t>(get_int(key)); }

double RunConfig::get_real(std::string_view key) const {
  if (require_key(key).kind != ValueKind::Real) throw ContractError(std::string(key) + " is not a real key");
  const std::string text = get(key);
  double v = 0.0;
  std::from_chars(text.data(), text.data() + text.size(), v);
  return v;
}

std::string RunConfig::serialize() const {
  std::string out;
  for (const auto& spec : config_schema()) {
    out += std::string(spec.name) + " = " + get(spec.name) + "\n";
  }
  return out;
}

std::string RunConfig::hash() const {
  const std::string text = serialize();
  const auto crc = crc32(0L, reinterpret_cast<const Bytef*>(text.data()), static_cast<uInt>(text.size()));
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08lx", static_cast<unsigned long>(crc));
  return buf;
}

CatchmentConfig RunConfig::catchment_config() const {
  CatchmentConfig c;
  c.length = get_size("data.length");
  c.storm_start_probability = get_real("data.storm_start_probability");
  c.storm_end_probability = get_real("data.storm_end_probability");
  c.mean_intensity_mm = get_real("data.mean_intensity_mm");
  c.alpha = get_real("data.alpha");
  c.beta = get_real("data.beta");
  c.base_inflow = get_real("data.base_inflow");
  c.diurnal_amplitude = get_real("data.diurnal_amplitude");
  c.flow_noise = get_real("data.flow_noise");
  c.temperature_mean = get_real("data.temperature_mean");
  c.temperature_amplitude = get_real("data.temperature_amplitude");
  c.validate();
  return c;
}

GanTrainConfig RunConfig::gan_config() const {
  GanTrainConfig c;
  c.lambda_gp = get_real("gan.lambda_gp");
  c.critic_iters = get_size("gan.critic_iters");
  c.batch_size = get_size("gan.batch_size");
  c.generator_layers = get_size("gan.generator_layers");
  c.generator_hidden = get_size("gan.generator_hidden");
  c.critic_layers = get_size("gan.critic_layers");
  c.critic_hidden = get_size("gan.critic_hidden");
  c.generator_adam = AdamConfig::gan_defaults();
  c.generator_adam.learning_rate = get_real("gan.generator_lr");
  c.generator_adam.beta1 = get_real("gan.beta1");
  c.generator_adam.beta2 = get_real("gan.beta2");
  c.critic_adam = c.generator_adam;
  c.critic_adam.learning_rate = get_real("gan.critic_lr");
  c.seed = seed();
  c.eval_every = get_size("gan.eval_every");
  c.eval_samples = get_size("gan.eval_samples");
  c.jsd_bins = get_size("gan.jsd_bins");
  c.checkpoint_every = get_size("gan.checkpoint_every");
  c.validate();
  return c;
}

ForecastConfig RunConfig::forecast_config() const {
  ForecastConfig c;
  c.cell = parse_cell_kind(get("forecast.cell"));
  c.layers = get_size("forecast.layers");
  c.hidden = get_size("forecast.hidden");
  c.batch_size = get_size("forecast.batch_size");
  c.max_epochs = get_size("forecast.max_epochs");
  c.patience = get_size("forecast.patience");
  c.validation_fraction = get_real("forecast.validation_fraction");
  c.adam.learning_rate = get_real("forecast.lr");
  c.adam.beta1 = get_real("forecast.beta1");
  c.adam.beta2 = get_real("forecast.beta2");
  c.seed = seed();
  c.validate();
  return c;
}

ExperimentConfig RunConfig::experiment_config() const {
  ExperimentConfig c;
  c.forecast = forecast_config();
  c.added_window_count = get_size("forecast.added_windows");
  c.peak_quantile = get_real("forecast.peak_quantile");
  return c;
}

std::uint64_t resolve_seed(const RunConfig& config) {
  if (config.is_set("seed")) return config.seed();
  const char* env = std::getenv("TSGAN_SEED");
  if (env == nullptr || *env == '\0') return config.seed();
  RunConfig probe;
  try {
    probe.set("seed", env);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("TSGAN_SEED: ") + e.what());
  }
  return probe.seed();
}

}  // namespace tsgan
