// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tsgan/config.hpp"
#include "tsgan/errors.hpp"
#include "tsgan/run.hpp"

namespace {

constexpr int kUsageError = 2;
constexpr int kRuntimeError = 1;

/// Flags shared by every subcommand plus shortcuts that map onto config keys.
struct Options {
  std::string config_path;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> assignments;
  std::map<std::string, std::string> shortcuts;  // config key -> value
  std::vector<std::string> checkpoints;
};

void add_common(CLI::App& cmd, Options& opt, bool out_required) {
  cmd.add_option("--config", opt.config_path, "config or manifest file (key = value lines)")->check(CLI::ExistingFile);
  auto* out = cmd.add_option("--out", opt.out, "output directory");
  if (out_required) out->required();
  cmd.add_option("--seed", opt.seed, "master seed (overrides the config and TSGAN_SEED)");
  cmd.add_option("--set", opt.assignments, "config override key=value (repeatable)");
}

void add_shortcut(CLI::App& cmd, Options& opt, const std::string& flag, const std::string& key,
                  const std::string& help) {
  cmd.add_option_function<std::string>(
      flag, [&opt, key](const std::string& value) { opt.shortcuts[key] = value; }, help + " (" + key + ")");
}

tsgan::RunConfig build_config(const Options& opt) {
  tsgan::RunConfig config = opt.config_path.empty() ? tsgan::RunConfig{} : tsgan::RunConfig::load(opt.config_path);
  for (const auto& [key, value] : opt.shortcuts) config.set(key, value);
  for (const auto& a : opt.assignments) config.set_assignment(a);
  if (opt.seed) {
    config.set("seed", std::to_string(*opt.seed));
  } else {
    config.set("seed", std::to_string(tsgan::resolve_seed(config)));
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tsgan: WGAN-GP augmentation of rainfall/flow windows and flow forecasting"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "tsgan 1.0.0");

  Options opt;
  std::map<std::string, CLI::App*> commands;
  const auto sub = [&](const std::string& name, const std::string& help, bool out_required) {
    CLI::App* cmd = app.add_subcommand(name, help);
    add_common(*cmd, opt, out_required);
    commands[name] = cmd;
    return cmd;
  };

  auto* synth = sub("synth-data", "write a synthetic catchment series CSV", true);
  add_shortcut(*synth, opt, "--length", "data.length", "series length");

  sub("preprocess", "write preprocessed train/test windows and channel stats", true);

  auto* gan = sub("train-gan", "train the WGAN-GP generator on wet training windows", true);
  add_shortcut(*gan, opt, "--steps", "gan.steps", "generator steps");

  auto* generate = sub("generate", "sample windows from a GAN checkpoint", true);
  add_shortcut(*generate, opt, "--checkpoint", "path.gan_checkpoint", "GAN checkpoint");
  add_shortcut(*generate, opt, "--count", "generate.count", "number of windows");

  auto* forecaster = sub("train-forecaster", "train a rainfall-to-flow forecaster", true);
  add_shortcut(*forecaster, opt, "--augment", "forecast.augment", "none|oversample|gan");
  add_shortcut(*forecaster, opt, "--gan-checkpoint", "path.gan_checkpoint", "GAN checkpoint for gan augmentation");

  auto* evaluate = sub("evaluate", "score forecaster checkpoints on the test windows", true);
  evaluate->add_option("--checkpoint", opt.checkpoints, "forecaster checkpoint (repeatable; path.forecast_checkpoint)");

  auto* tune = sub("tune", "random search with successive halving on JSD", true);
  add_shortcut(*tune, opt, "--trials", "tune.trials", "sampled configurations");
  add_shortcut(*tune, opt, "--rungs", "tune.rungs", "pruning rounds");
  add_shortcut(*tune, opt, "--budget", "tune.budget", "total generator steps");

  auto* gradcheck = sub("gradcheck", "finite-difference checks of every differentiable op", false);
  add_shortcut(*gradcheck, opt, "--cases", "gradcheck.cases", "random cases per op");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  std::string command;
  for (const auto& [name, cmd] : commands) {
    if (cmd->parsed()) command = name;
  }
  if (!opt.checkpoints.empty()) {
    std::string joined;
    for (const auto& c : opt.checkpoints) joined += (joined.empty() ? "" : ",") + c;
    opt.shortcuts["path.forecast_checkpoint"] = joined;
  }

  tsgan::RunConfig config;
  try {
    config = build_config(opt);
  } catch (const tsgan::ConfigError& e) {
    std::cerr << "tsgan " << command << ": config error: " << e.what() << "\n";
    return kUsageError;
  } catch (const tsgan::ParseError& e) {
    std::cerr << "tsgan " << command << ": config error: " << e.what() << "\n";
    return kUsageError;
  }

  try {
    std::optional<std::filesystem::path> out;
    if (!opt.out.empty()) out = opt.out;
    const tsgan::CommandResult result = tsgan::run_command(command, config, out);
    if (!result.details.empty()) std::cout << result.details;
    std::cout << result.summary << std::endl;
    return result.exit_code;
  } catch (const tsgan::ConfigError& e) {
    std::cerr << "tsgan " << command << ": config error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "tsgan " << command << ": error: " << e.what() << "\n";
    return kRuntimeError;
  }
}
