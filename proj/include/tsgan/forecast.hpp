// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "tsgan/data.hpp"
#include "tsgan/gan.hpp"
#include "tsgan/metrics.hpp"
#include "tsgan/nn.hpp"

namespace tsgan {

enum class CellKind : std::uint8_t { Lstm = 0, Gru = 1 };
std::string_view to_string(CellKind kind);
CellKind parse_cell_kind(std::string_view text);

/// Rainfall window (batch, steps, 1) -> flow window (batch, steps), one dense
/// head applied to every step of the top recurrent layer.
struct ForecastModel {
  CellKind cell = CellKind::Lstm;
  LstmStack lstm;  // used when cell == Lstm
  GruStack gru;    // used when cell == Gru
  LinearLayer head;

  std::size_t hidden_size() const;
  std::vector<Tensor> parameters() const;
  void append_named(const std::string& prefix, std::vector<NamedTensor>& out) const;
};

struct ForecastConfig {
  CellKind cell = CellKind::Lstm;
  std::size_t layers = 2;
  std::size_t hidden = 64;
  std::size_t batch_size = 64;
  std::size_t max_epochs = 30;
  std::size_t patience = 5;  // epochs without validation improvement
  double validation_fraction = 0.1;
  AdamConfig adam;  // 1e-3, 0.9, 0.999
  std::uint64_t seed = 0;

  void validate() const;
};

ForecastModel make_forecast_model(const ForecastConfig& config, Rng& rng);

/// Differentiable forward pass.
Tensor forecast_forward(const ForecastModel& model, const Tensor& rain);

/// Inference on rainfall windows (count, steps) or (count, steps, 1); returns
/// (count, steps). Runs without recording, in chunks.
Tensor predict(const ForecastModel& model, const Tensor& rain, std::size_t chunk = 512);
/// One window of `kWindowLength` rainfall values.
std::vector<double> predict_window(const ForecastModel& model, std::span<const double> rain);

/// (count, steps, 1) slice of one channel.
Tensor channel_tensor(const WindowBatch& batch, std::string_view channel);

// ---------------------------------------------------------------------------
// Augmentation

enum class AugmentMode : std::uint8_t { None = 0, Oversample = 1, Gan = 2 };
std::string_view to_string(AugmentMode mode);
AugmentMode parse_augment_mode(std::string_view text);

struct AugmentationPlan {
  AugmentMode mode = AugmentMode::None;
  std::size_t added_window_count = 8000;
  const GeneratorParams* generator = nullptr;  // required for Gan
};

/// none: the real batch unchanged. oversample: plus `added_window_count`
/// uniform draws (with replacement) from the wet real windows, tagged
/// oversampled. gan: plus as many generated windows, tagged synthetic. The
/// augmented modes are shuffled with `rng`.
WindowBatch build_training_set(const WindowBatch& real, const AugmentationPlan& plan, Rng& rng);

// ---------------------------------------------------------------------------
// Training

struct ForecastTrainResult {
  ForecastModel model;  // parameters of the best validation epoch
  std::vector<double> train_loss;      // mean MAE per epoch
  std::vector<double> validation_mae;  // per epoch
  std::vector<double> best_validation_mae;  // running minimum
  std::size_t best_epoch = 0;
  std::size_t steps = 0;
  bool stopped_early = false;
};

/// Minimizes MAE between predicted and observed flow with Adam, keeping the
/// parameters of the best validation epoch. Throws TrainingError on a
/// non-finite loss.
ForecastTrainResult train_forecaster(const ForecastConfig& config, const WindowBatch& train,
                                     const WindowBatch& validation);

/// Chronological hold-out: the last ceil(fraction * count) windows validate.
struct ValidationSplit {
  WindowBatch fit;
  WindowBatch validation;
};
ValidationSplit split_validation(const WindowBatch& train, double fraction);

/// Augments `split.fit` per `plan` (shuffle stream seed ^ (0xa0 + mode)) and
/// trains on it.
ForecastTrainResult train_augmented(const ForecastConfig& config, const AugmentationPlan& plan,
                                    const ValidationSplit& split);

/// "plain", "oversample" or "gan".
std::string_view arm_name(AugmentMode mode);

// ---------------------------------------------------------------------------
// Evaluation

struct ForecastEvaluation {
  std::string name;
  PeakMetrics metrics;  // physical flow units
  std::vector<double> window_mae;  // per test window, physical units
};

/// Predictions on real test windows mapped back to physical flow. The peak
/// threshold is the given quantile of the observed test flow.
ForecastEvaluation evaluate_forecaster(const std::string& name, const ForecastModel& model,
                                       const WindowBatch& test, const ChannelStats& flow_stats,
                                       double peak_quantile = 0.95);

struct ExperimentReport {
  std::vector<ForecastEvaluation> rows;  // plain, oversample, gan (those run)
  std::vector<ForecastTrainResult> training;

  const ForecastEvaluation& row(std::string_view name) const;
  void write_text(std::ostream& out) const;
  void write_window_csv(std::ostream& out) const;
};

struct ExperimentConfig {
  ForecastConfig forecast;
  std::size_t added_window_count = 8000;
  double peak_quantile = 0.95;
  bool run_gan = true;
};

/// Trains plain, oversampled and (when a generator is given) GAN-augmented
/// forecasters on `train` (chronological real windows; the last
/// validation_fraction of them are held out for early stopping) and compares
/// them on `test`.
ExperimentReport compare_experiments(const ExperimentConfig& config, const WindowBatch& train, const WindowBatch& test,
                                     const ChannelStats& flow_stats, const GeneratorParams* generator);

}  // namespace tsgan
