// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#include "tsgan/run.hpp"

#include <zlib.h>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <sstream>

#include "tsgan/checkpoint.hpp"
#include "tsgan/errors.hpp"
#include "tsgan/forecast.hpp"
#include "tsgan/gan.hpp"
#include "tsgan/gradcheck.hpp"
#include "tsgan/tune.hpp"

namespace tsgan {
namespace fs = std::filesystem;

namespace {

constexpr std::string_view kPathKeys[] = {"path.data", "path.gan_checkpoint", "path.forecast_checkpoint"};

std::string hex32(std::uint32_t v) {
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", v);
  return buf;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = trim(text.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    text = text.substr(comma + 1);
  }
  return out;
}

/// Input paths made absolute so a manifest replays from any directory.
RunConfig absolute_paths(const RunConfig& config) {
  RunConfig out = config;
  for (const auto key : kPathKeys) {
    const std::string value = config.get(key);
    if (value.empty()) continue;
    std::string joined;
    for (const auto& item : split_list(value)) {
      joined += (joined.empty() ? "" : ",") + fs::absolute(item).lexically_normal().string();
    }
    out.set(key, joined);
  }
  return out;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

/// Starts a run: creates `out` and a manifest holding the resolved config.
Manifest begin(std::string_view command, const RunConfig& config, const fs::path& out) {
  fs::create_directories(out);
  return Manifest{std::string(command), absolute_paths(config), {}};
}

void finish(CommandResult& result, const fs::path& out, const std::vector<std::string>& artifacts) {
  for (const auto& name : artifacts) result.manifest.artifacts.push_back(describe_artifact(out, name));
  result.manifest.save(manifest_path(out, result.manifest.command));
}

void write_stats_csv(const PreprocStats& stats, std::ostream& out) {
  out << "channel,log_transform,mean,stddev\n";
  for (const auto& c : stats.channels) {
    out << c.name << ',' << (c.log_transform ? 1 : 0) << ',' << format_real(c.mean) << ',' << format_real(c.stddev)
        << '\n';
  }
}

std::string require_path(const RunConfig& config, std::string_view key, std::string_view command) {
  std::string value = config.get(key);
  if (value.empty()) throw ConfigError(std::string(command) + " needs " + std::string(key) + " (or --checkpoint)");
  return value;
}

std::string format_fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Manifest

std::uint32_t file_crc32(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  uLong crc = crc32(0L, Z_NULL, 0);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const auto n = in.gcount();
    if (n > 0) crc = crc32(crc, reinterpret_cast<const Bytef*>(buf.data()), static_cast<uInt>(n));
  }
  return static_cast<std::uint32_t>(crc);
}

Artifact describe_artifact(const fs::path& dir, const std::string& name) {
  const fs::path path = dir / name;
  return {name, file_crc32(path), static_cast<std::uint64_t>(fs::file_size(path))};
}

std::string Manifest::to_text() const {
  std::ostringstream out;
  out << "# tsgan manifest\n";
  out << "# command = " << command << "\n";
  out << "# config_hash = " << config.hash() << "\n";
  out << "# seed = " << config.seed() << "\n";
  for (const auto& a : artifacts) {
    out << "# artifact " << a.name << " crc32=" << hex32(a.crc32) << " bytes=" << a.bytes << "\n";
  }
  out << config.serialize();
  return out.str();
}

Manifest Manifest::parse_text(std::string_view text) {
  Manifest m;
  m.config = RunConfig::parse_text(text);
  std::istringstream lines{std::string(text)};
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind("# command = ", 0) == 0) {
      m.command = line.substr(12);
    } else if (line.rfind("# artifact ", 0) == 0) {
      std::istringstream fields(line.substr(11));
      std::string name, crc, bytes;
      fields >> name >> crc >> bytes;
      if (crc.rfind("crc32=", 0) != 0 || bytes.rfind("bytes=", 0) != 0) {
        throw FormatError("manifest: malformed artifact line: " + line);
      }
      Artifact a;
      a.name = name;
      a.crc32 = static_cast<std::uint32_t>(std::stoul(crc.substr(6), nullptr, 16));
      a.bytes = std::stoull(bytes.substr(6));
      m.artifacts.push_back(a);
    }
  }
  return m;
}

Manifest Manifest::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_text(text);
}

void Manifest::save(const fs::path& path) const {
  auto out = open_output(path);
  out << to_text();
}

fs::path manifest_path(const fs::path& out, std::string_view command) {
  return out / (std::string(command) + ".manifest");
}

// ---------------------------------------------------------------------------
// Data

PreparedData prepare_data(const RunConfig& config, const PreprocStats* stats) {
  const std::string data_path = config.get("path.data");
  SeriesDataset raw = data_path.empty() ? synth_catchment(config.catchment_config(), config.seed())
                                        : load_csv(data_path);
  const SeriesSplit split =
      split_chronological(raw, config.get_size("split.train_windows"), config.get_size("split.test_windows"));
  const auto channels = model_channels();
  Standardized train = preprocess(split.train, channels, stats);
  Standardized test = preprocess(split.test, channels, &train.stats);
  return {train.stats, make_windows(train.data), make_windows(test.data)};
}

// ---------------------------------------------------------------------------
// Subcommands

CommandResult run_synth_data(const RunConfig& config, const fs::path& out) {
  CommandResult result;
  result.manifest = begin("synth-data", config, out);
  const SeriesDataset data = synth_catchment(config.catchment_config(), config.seed());
  save_csv(data, out / "series.csv");
  finish(result, out, {"series.csv"});
  result.summary = "synth-data: " + std::to_string(data.length()) + " steps, seed " + std::to_string(config.seed()) +
                   " -> " + (out / "series.csv").string();
  return result;
}

CommandResult run_preprocess(const RunConfig& config, const fs::path& out) {
  CommandResult result;
  result.manifest = begin("preprocess", config, out);
  const PreparedData data = prepare_data(result.manifest.config);
  {
    auto f = open_output(out / "train_windows.csv");
    write_windows_csv(data.train, f);
  }
  {
    auto f = open_output(out / "test_windows.csv");
    write_windows_csv(data.test, f);
  }
  {
    auto f = open_output(out / "stats.csv");
    write_stats_csv(data.stats, f);
  }
  finish(result, out, {"train_windows.csv", "test_windows.csv", "stats.csv"});
  result.summary = "preprocess: " + std::to_string(data.train.count()) + " train windows (" +
                   std::to_string(wet_window_indices(data.train).size()) + " wet), " +
                   std::to_string(data.test.count()) + " test windows -> " + out.string();
  return result;
}

CommandResult run_train_gan(const RunConfig& config, const fs::path& out) {
  CommandResult result;
  result.manifest = begin("train-gan", config, out);
  const RunConfig& cfg = result.manifest.config;
  const PreparedData data = prepare_data(cfg);
  const WindowBatch wet = filter_flat_windows(data.train);
  GanTrainer trainer(cfg.gan_config(), wet);

  std::vector<std::string> artifacts;
  trainer.set_checkpoint_hook([&](const GanTrainer& t) {
    const std::string name = "gan-step" + std::to_string(t.model().generator_steps) + ".ckpt";
    save_checkpoint(make_gan_checkpoint(t, data.stats, cfg), out / name);
    artifacts.push_back(name);
    return (out / name).string();
  });
  trainer.train(cfg.get_size("gan.steps"));
  const double jsd = trainer.evaluate_now();

  save_checkpoint(make_gan_checkpoint(trainer, data.stats, cfg), out / "gan.ckpt");
  {
    auto f = open_output(out / "gan_log.csv");
    f << "step,critic_loss,wasserstein,penalty,generator_loss,jsd\n";
    for (const auto& e : trainer.log()) {
      f << e.step << ',' << format_real(e.critic_loss) << ',' << format_real(e.wasserstein) << ','
        << format_real(e.penalty) << ',' << format_real(e.generator_loss) << ','
        << (e.jsd ? format_real(*e.jsd) : "") << '\n';
    }
  }
  artifacts.push_back("gan.ckpt");
  artifacts.push_back("gan_log.csv");
  finish(result, out, artifacts);
  result.summary = "train-gan: " + std::to_string(trainer.model().generator_steps) + " generator steps on " +
                   std::to_string(wet.count()) + " wet windows, mean JSD " + format_fixed(jsd) + " -> " +
                   (out / "gan.ckpt").string();
  return result;
}

CommandResult run_generate(const RunConfig& config, const fs::path& out) {
  CommandResult result;
  result.manifest = begin("generate", config, out);
  const RunConfig& cfg = result.manifest.config;
  const Checkpoint ckpt = load_checkpoint(require_path(cfg, "path.gan_checkpoint", "generate"));
  const GanModel model = load_gan_model(ckpt);
  const auto channels = split_list(ckpt.meta_value("channels"));
  const std::size_t count = cfg.get_size("generate.count");
  Rng rng(derive_seed(cfg.seed(), 0x9e4e));
  const WindowBatch batch = generate_batch(model.generator, channels, count, rng);
  {
    auto f = open_output(out / "generated.csv");
    write_windows_csv(batch, f);
  }
  finish(result, out, {"generated.csv"});
  result.summary = "generate: " + std::to_string(count) + " windows x " + std::to_string(batch.steps()) +
                   " steps x " + std::to_string(channels.size()) + " channels -> " +
                   (out / "generated.csv").string();
  return result;
}

CommandResult run_train_forecaster(const RunConfig& config, const fs::path& out) {
  CommandResult result;
  result.manifest = begin("train-forecaster", config, out);
  const RunConfig& cfg = result.manifest.config;
  const ForecastConfig fc = cfg.forecast_config();
  const PreparedData data = prepare_data(cfg);

  AugmentationPlan plan;
  plan.mode = parse_augment_mode(cfg.get("forecast.augment"));
  plan.added_window_count = cfg.get_size("forecast.added_windows");
  std::optional<GanModel> gan;
  if (plan.mode == AugmentMode::Gan) {
    const std::string path = cfg.get("path.gan_checkpoint");
    if (path.empty()) throw ConfigError("forecast.augment = gan needs path.gan_checkpoint");
    const Checkpoint ckpt = load_checkpoint(path);
    if (split_list(ckpt.meta_value("channels")) != data.train.channels) {
      throw ConfigError("GAN checkpoint channels do not match the forecaster data");
    }
    gan = load_gan_model(ckpt);
    plan.generator = &gan->generator;
  }
  const ForecastTrainResult trained = train_augmented(fc, plan, split_validation(data.train, fc.validation_fraction));

  save_checkpoint(make_forecast_checkpoint(trained.model, data.stats, cfg), out / "forecaster.ckpt");
  {
    auto f = open_output(out / "forecast_log.csv");
    f << "epoch,train_mae,validation_mae,best_validation_mae\n";
    for (std::size_t e = 0; e < trained.train_loss.size(); ++e) {
      f << e << ',' << format_real(trained.train_loss[e]) << ',' << format_real(trained.validation_mae[e]) << ','
        << format_real(trained.best_validation_mae[e]) << '\n';
    }
  }
  finish(result, out, {"forecaster.ckpt", "forecast_log.csv"});
  result.summary = "train-forecaster: " + std::string(arm_name(plan.mode)) + ", " +
                   std::to_string(trained.train_loss.size()) + " epochs, best validation MAE " +
                   format_fixed(trained.best_validation_mae.back()) + " at epoch " +
                   std::to_string(trained.best_epoch) + " -> " + (out / "forecaster.ckpt").string();
  return result;
}

CommandResult run_evaluate(const RunConfig& config, const fs::path& out) {
  CommandResult result;
  result.manifest = begin("evaluate", config, out);
  const RunConfig& cfg = result.manifest.config;
  const auto paths = split_list(require_path(cfg, "path.forecast_checkpoint", "evaluate"));
  ExperimentReport report;
  for (const auto& path : paths) {
    const Checkpoint ckpt = load_checkpoint(path);
    const ForecastModel model = load_forecast_model(ckpt);
    const PreprocStats stats = load_preproc_stats(ckpt);
    const PreparedData data = prepare_data(cfg, &stats);
    const std::string name(arm_name(parse_augment_mode(ckpt.config.get("forecast.augment"))));
    report.rows.push_back(
        evaluate_forecaster(name, model, data.test, stats.find(kFlow), cfg.get_real("forecast.peak_quantile")));
  }
  std::ostringstream table;
  report.write_text(table);
  {
    auto f = open_output(out / "evaluation.txt");
    f << table.str();
  }
  {
    auto f = open_output(out / "window_mae.csv");
    report.write_window_csv(f);
  }
  finish(result, out, {"evaluation.txt", "window_mae.csv"});
  result.details = table.str();
  std::string line = "evaluate:";
  for (const auto& r : report.rows) {
    line += " " + r.name + " mae=" + format_fixed(r.metrics.mae) +
            " peak_mae=" + (r.metrics.peak_mae ? format_fixed(*r.metrics.peak_mae) : "n/a") +
            " dry_mae=" + (r.metrics.dry_mae ? format_fixed(*r.metrics.dry_mae) : "n/a") + ";";
  }
  result.summary = line + " -> " + (out / "evaluation.txt").string();
  return result;
}

CommandResult run_tune(const RunConfig& config, const fs::path& out) {
  CommandResult result;
  result.manifest = begin("tune", config, out);
  const RunConfig& cfg = result.manifest.config;
  // Check the budget before spending time on data.
  plan_successive_halving(cfg.get_size("tune.trials"), cfg.get_size("tune.rungs"), cfg.get_size("tune.budget"));
  const PreparedData data = prepare_data(cfg);
  const WindowBatch wet = filter_flat_windows(data.train);
  const SearchSpace space{cfg.get_size("tune.max_layers"), cfg.get_size("tune.max_hidden")};
  const auto trials = sample_search_space(cfg.gan_config(), cfg.get_size("tune.trials"), space);
  const TuneReport report = tune_gan(trials, wet, cfg.get_size("tune.rungs"), cfg.get_size("tune.budget"));
  std::ostringstream table;
  report.write_table(table);
  {
    auto f = open_output(out / "tune.csv");
    f << table.str();
  }
  finish(result, out, {"tune.csv"});
  result.details = table.str();
  const auto& best = report.best();
  std::string schedule;
  for (const auto& r : report.rungs) schedule += std::to_string(r.entrants.size()) + " -> ";
  schedule += std::to_string(report.rungs.back().survivors.size());
  result.summary = "tune: " + schedule + " trials, best trial " + std::to_string(best.index) + " (G " +
                   std::to_string(best.config.generator_layers) + "x" + std::to_string(best.config.generator_hidden) +
                   ", D " + std::to_string(best.config.critic_layers) + "x" +
                   std::to_string(best.config.critic_hidden) + ") JSD " + format_fixed(best.score) + " -> " +
                   (out / "tune.csv").string();
  return result;
}

CommandResult run_gradcheck(const RunConfig& config, const std::optional<fs::path>& out) {
  CommandResult result;
  result.manifest = Manifest{"gradcheck", absolute_paths(config), {}};
  const std::size_t cases = config.get_size("gradcheck.cases");
  const GradcheckReport first = run_primitive_gradchecks(config.seed(), cases);
  const GradcheckReport second = run_second_order_gradchecks(config.seed(), cases);

  std::ostringstream table;
  table << "suite,cases,max_rel_error,tolerance,status\n";
  for (const auto* report : {&first, &second}) {
    for (const auto& r : report->results) {
      table << r.name << ',' << r.cases << ',' << std::scientific << std::setprecision(3) << r.max_rel_error << ','
            << r.tolerance << std::defaultfloat << ',' << (r.passed() ? "ok" : "FAIL") << '\n';
    }
  }
  result.details = table.str();
  const bool ok = first.passed() && second.passed();
  result.exit_code = ok ? 0 : 1;
  std::ostringstream line;
  line << "gradcheck: first-order max rel error " << std::scientific << std::setprecision(2) << first.max_error()
       << " (tol 1e-05), second-order " << second.max_error() << " (tol 1e-04), seed " << config.seed() << ": "
       << (ok ? "PASS" : "FAIL");
  result.summary = line.str();
  if (out) {
    fs::create_directories(*out);
    {
      auto f = open_output(*out / "gradcheck.csv");
      f << table.str();
    }
    finish(result, *out, {"gradcheck.csv"});
  }
  return result;
}

CommandResult run_command(std::string_view command, const RunConfig& config, const std::optional<fs::path>& out) {
  if (command == "gradcheck") return run_gradcheck(config, out);
  if (!out) throw ConfigError(std::string(command) + " needs --out");
  if (command == "synth-data") return run_synth_data(config, *out);
  if (command == "preprocess") return run_preprocess(config, *out);
  if (command == "train-gan") return run_train_gan(config, *out);
  if (command == "generate") return run_generate(config, *out);
  if (command == "train-forecaster") return run_train_forecaster(config, *out);
  if (command == "evaluate") return run_evaluate(config, *out);
  if (command == "tune") return run_tune(config, *out);
  throw ContractError("unknown command '" + std::string(command) + "'");
}

}  // namespace tsgan
