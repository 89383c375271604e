// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "tsgan/config.hpp"
#include "tsgan/data.hpp"
#include "tsgan/forecast.hpp"
#include "tsgan/gan.hpp"
#include "tsgan/nn.hpp"

namespace tsgan {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary layout, all integers little-endian:
///   "SGN1" | u32 version | u32 tensor count
///   per tensor: u16 name length | name | u8 rank | u64 dims[rank] | f64 values
///   u32 snapshot length | snapshot (UTF-8) | u32 CRC32 of every preceding byte
///
/// The snapshot holds the run config followed by `meta.<key> = <value>` lines
/// (model kind, preprocessing stats, RNG and optimizer counters).
struct Checkpoint {
  std::uint32_t version = kCheckpointVersion;
  std::vector<NamedTensor> tensors;
  RunConfig config;
  std::map<std::string, std::string, std::less<>> meta;

  bool has(std::string_view name) const;
  const Tensor& tensor(std::string_view name) const;
  const std::string& meta_value(std::string_view key) const;

  std::string snapshot() const;
};

/// FormatError on bad magic or version; CorruptionError when the file is
/// truncated or the checksum does not match.
void write_checkpoint(const Checkpoint& ckpt, std::ostream& out);
Checkpoint read_checkpoint(std::istream& in);
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Copies checkpoint tensors into the same-named tensors of `target`.
/// FormatError when one is missing or has another shape.
void restore_tensors(const Checkpoint& ckpt, const std::vector<NamedTensor>& target);

void store_preproc_stats(const PreprocStats& stats, Checkpoint& ckpt);
PreprocStats load_preproc_stats(const Checkpoint& ckpt);

// ---------------------------------------------------------------------------
// Model checkpoints

/// Generator, critic, both Adam states, step counters, training RNG state and
/// preprocessing stats; enough to resume bit-exactly.
Checkpoint make_gan_checkpoint(const GanTrainer& trainer, const PreprocStats& stats, const RunConfig& config);
/// Model architecture comes from the snapshot config.
GanModel load_gan_model(const Checkpoint& ckpt);
/// Restores model, optimizer and RNG state into a trainer built from the same config.
void restore_gan_trainer(const Checkpoint& ckpt, GanTrainer& trainer);

Checkpoint make_forecast_checkpoint(const ForecastModel& model, const PreprocStats& stats, const RunConfig& config);
ForecastModel load_forecast_model(const Checkpoint& ckpt);

/// Named tensors of an Adam state: <prefix>.m.<i> and <prefix>.v.<i>.
void append_adam_named(const AdamState& state, const std::string& prefix, std::vector<NamedTensor>& out);

}  // namespace tsgan
