// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "tsgan/config.hpp"
#include "tsgan/data.hpp"

namespace tsgan {

// ---------------------------------------------------------------------------
// Manifests

struct Artifact {
  std::string name;  // path relative to the output directory
  std::uint32_t crc32 = 0;
  std::uint64_t bytes = 0;

  friend bool operator==(const Artifact&, const Artifact&) = default;
};

Artifact describe_artifact(const std::filesystem::path& dir, const std::string& name);
/// CRC32 of a file's bytes.
std::uint32_t file_crc32(const std::filesystem::path& path);

/// A run record that is itself a loadable config: metadata lives in comment
/// lines, so `--config <manifest>` repeats the run.
///
///   # tsgan manifest
///   # command = train-gan
///   # config_hash = 0123abcd
///   # seed = 7
///   # artifact gan.ckpt crc32=89abcdef bytes=1234
///   <every config key>
struct Manifest {
  std::string command;
  RunConfig config;
  std::vector<Artifact> artifacts;

  std::string to_text() const;
  static Manifest parse_text(std::string_view text);
  static Manifest load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

/// `<out>/<command>.manifest`
std::filesystem::path manifest_path(const std::filesystem::path& out, std::string_view command);

// ---------------------------------------------------------------------------
// Data preparation shared by the subcommands

struct PreparedData {
  PreprocStats stats;  // fitted on the training region
  WindowBatch train;   // every stride-1 training window, chronological
  WindowBatch test;
};

/// Loads path.data (or synthesizes the catchment from the data.* keys and the
/// seed when it is empty), splits it chronologically into split.train_windows
/// and split.test_windows, and preprocesses both regions with statistics
/// fitted on the training region (or `stats` when given).
PreparedData prepare_data(const RunConfig& config, const PreprocStats* stats = nullptr);

// ---------------------------------------------------------------------------
// Subcommands. Each writes its artifacts and manifest under `out` and returns
// a one-line summary. `config` must already carry the resolved seed.

struct CommandResult {
  std::string details;  // optional multi-line report printed before the summary
  std::string summary;
  Manifest manifest;
  int exit_code = 0;
};

inline constexpr std::string_view kCommands[] = {"synth-data",       "preprocess", "train-gan", "generate",
                                                 "train-forecaster", "evaluate",   "tune",      "gradcheck"};

CommandResult run_synth_data(const RunConfig& config, const std::filesystem::path& out);
CommandResult run_preprocess(const RunConfig& config, const std::filesystem::path& out);
CommandResult run_train_gan(const RunConfig& config, const std::filesystem::path& out);
CommandResult run_generate(const RunConfig& config, const std::filesystem::path& out);
CommandResult run_train_forecaster(const RunConfig& config, const std::filesystem::path& out);
CommandResult run_evaluate(const RunConfig& config, const std::filesystem::path& out);
CommandResult run_tune(const RunConfig& config, const std::filesystem::path& out);
/// Exit code 0 iff every suite is under tolerance. Writes a report and
/// manifest only when `out` is given.
CommandResult run_gradcheck(const RunConfig& config, const std::optional<std::filesystem::path>& out);

/// Dispatches by name; ContractError for an unknown command. Only gradcheck
/// accepts a missing `out`.
CommandResult run_command(std::string_view command, const RunConfig& config,
                          const std::optional<std::filesystem::path>& out);

}  // namespace tsgan
