// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#include "tsgan/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "tsgan/autodiff.hpp"
#include "tsgan/errors.hpp"
#include "tsgan/ops.hpp"

namespace tsgan {

std::string_view to_string(CellKind kind) { return kind == CellKind::Lstm ? "lstm" : "gru"; }

CellKind parse_cell_kind(std::string_view text) {
  if (text == "lstm") return CellKind::Lstm;
  if (text == "gru") return CellKind::Gru;
  throw ConfigError("unknown cell kind '" + std::string(text) + "' (expected lstm or gru)");
}

std::string_view to_string(AugmentMode mode) {
  switch (mode) {
    case AugmentMode::None: return "none";
    case AugmentMode::Oversample: return "oversample";
    case AugmentMode::Gan: return "gan";
  }
  return "unknown";
}

AugmentMode parse_augment_mode(std::string_view text) {
  if (text == "none") return AugmentMode::None;
  if (text == "oversample") return AugmentMode::Oversample;
  if (text == "gan") return AugmentMode::Gan;
  throw ConfigError("unknown augmentation mode '" + std::string(text) + "'");
}

std::size_t ForecastModel::hidden_size() const { return cell == CellKind::Lstm ? lstm.hidden_size : gru.hidden_size; }

std::vector<Tensor> ForecastModel::parameters() const {
  auto params = cell == CellKind::Lstm ? lstm.parameters() : gru.parameters();
  params.push_back(head.weight);
  params.push_back(head.bias);
  return params;
}

void ForecastModel::append_named(const std::string& prefix, std::vector<NamedTensor>& out) const {
  if (cell == CellKind::Lstm) {
    lstm.append_named(prefix + ".lstm", out);
  } else {
    gru.append_named(prefix + ".gru", out);
  }
  head.append_named(prefix + ".head", out);
}

void ForecastConfig::validate() const {
  if (layers < 1 || hidden < 1) throw ConfigError("forecaster layers and hidden size must be at least 1");
  if (batch_size < 1) throw ConfigError("forecaster batch_size must be at least 1");
  if (max_epochs < 1) throw ConfigError("forecaster max_epochs must be at least 1");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw ConfigError("validation_fraction must lie in (0, 1)");
  }
  adam.validate();
}

ForecastModel make_forecast_model(const ForecastConfig& config, Rng& rng) {
  config.validate();
  ForecastModel model;
  model.cell = config.cell;
  if (config.cell == CellKind::Lstm) {
    model.lstm = make_lstm_stack(1, config.hidden, config.layers, rng);
  } else {
    model.gru = make_gru_stack(1, config.hidden, config.layers, rng);
  }
  model.head = make_linear(config.hidden, 1, rng);
  return model;
}

Tensor forecast_forward(const ForecastModel& model, const Tensor& rain) {
  if (rain.rank() != 3 || rain.dim(2) != 1) {
    throw ShapeError("forecaster: expected rainfall (batch, steps, 1), got " + shape_str(rain.shape()));
  }
  const std::size_t batch = rain.dim(0);
  const std::size_t steps = rain.dim(1);
  Tensor hidden;
  if (model.cell == CellKind::Lstm) {
    hidden = lstm_forward(model.lstm, rain).outputs;
  } else {
    hidden = gru_forward(model.gru, rain, Tensor::zeros({model.gru.num_layers(), batch, model.gru.hidden_size}))
                 .outputs;
  }
  const Tensor flat = reshape(hidden, {batch * steps, model.hidden_size()});
  return reshape(linear_forward(model.head, flat), {batch, steps});
}

Tensor predict(const ForecastModel& model, const Tensor& rain, std::size_t chunk) {
  Tensor input = rain;
  if (rain.rank() == 2) input = reshape(rain, {rain.dim(0), rain.dim(1), 1});
  if (input.rank() != 3 || input.dim(2) != 1) throw ShapeError("predict: expected rainfall (count, steps[, 1])");
  if (input.dim(1) != kWindowLength) {
    throw ShapeError("predict: windows must have " + std::to_string(kWindowLength) + " steps, got " +
                     std::to_string(input.dim(1)));
  }
  NoGradGuard no_grad;
  const std::size_t count = input.dim(0);
  std::vector<double> out;
  out.reserve(count * input.dim(1));
  for (std::size_t done = 0; done < count; done += chunk) {
    const std::size_t n = std::min(chunk, count - done);
    const Tensor part = forecast_forward(model, slice(input, 0, done, n));
    const auto v = part.values();
    out.insert(out.end(), v.begin(), v.end());
  }
  return Tensor({count, input.dim(1)}, std::move(out));
}

std::vector<double> predict_window(const ForecastModel& model, std::span<const double> rain) {
  if (rain.size() != kWindowLength) {
    throw ShapeError("predict_window: expected " + std::to_string(kWindowLength) + " rainfall values, got " +
                     std::to_string(rain.size()));
  }
  return predict(model, Tensor({1, rain.size(), 1}, {rain.begin(), rain.end()})).to_vector();
}

Tensor channel_tensor(const WindowBatch& batch, std::string_view channel) {
  return Tensor({batch.count(), batch.steps(), 1}, batch.channel_values(channel));
}

// ---------------------------------------------------------------------------

WindowBatch build_training_set(const WindowBatch& real, const AugmentationPlan& plan, Rng& rng) {
  if (plan.mode == AugmentMode::None) return real;
  if (real.count() == 0) throw SizeError("cannot augment an empty training set");
  WindowBatch added;
  if (plan.mode == AugmentMode::Oversample) {
    const std::vector<std::size_t> wet = wet_window_indices(real);
    if (wet.empty()) throw SizeError("oversampling needs at least one wet window");
    std::uniform_int_distribution<std::size_t> pick(0, wet.size() - 1);
    std::vector<std::size_t> idx(plan.added_window_count);
    for (auto& i : idx) i = wet[pick(rng)];
    added = real.subset(idx);
    added.provenance.assign(idx.size(), Provenance::Oversampled);
  } else {
    if (plan.generator == nullptr) throw ConfigError("gan augmentation needs a generator checkpoint");
    added = generate_batch(*plan.generator, real.channels, plan.added_window_count, rng);
  }
  const WindowBatch joined = real.concat(added);
  std::vector<std::size_t> order(joined.count());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  return joined.subset(order);
}

// ---------------------------------------------------------------------------

namespace {

double validation_mae(const ForecastModel& model, const Tensor& rain, const Tensor& flow) {
  const Tensor pred = predict(model, rain);
  return mae(pred.values(), flow.values());
}

ForecastModel clone_model(const ForecastModel& model) {
  ForecastModel copy = model;
  auto clone_layers = [](std::vector<RecurrentLayer>& layers) {
    for (auto& l : layers) l = {l.w_ih.clone(), l.w_hh.clone(), l.b_ih.clone(), l.b_hh.clone()};
  };
  clone_layers(copy.lstm.layers);
  clone_layers(copy.gru.layers);
  copy.head = {model.head.weight.clone(), model.head.bias.clone()};
  return copy;
}

}  // namespace

ForecastTrainResult train_forecaster(const ForecastConfig& config, const WindowBatch& train,
                                     const WindowBatch& validation) {
  config.validate();
  if (train.count() == 0 || validation.count() == 0) throw SizeError("forecaster needs training and validation windows");
  Rng init_rng(derive_seed(config.seed, 0xf0));
  Rng order_rng(derive_seed(config.seed, 0xf1));
  ForecastModel model = make_forecast_model(config, init_rng);
  AdamState opt;
  opt.config = config.adam;

  const Tensor rain = channel_tensor(train, kPrecipitation);
  const Tensor flow = reshape(channel_tensor(train, kFlow), {train.count(), train.steps()});
  const Tensor val_rain = channel_tensor(validation, kPrecipitation);
  const Tensor val_flow = reshape(channel_tensor(validation, kFlow), {validation.count(), validation.steps()});

  ForecastTrainResult result;
  result.model = clone_model(model);
  double best = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  std::vector<std::size_t> order(train.count());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t steps = train.steps();

  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), order_rng);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t n = std::min(config.batch_size, order.size() - start);
      std::vector<double> xb(n * steps), yb(n * steps);
      const auto rv = rain.values();
      const auto fv = flow.values();
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t w = order[start + k];
        std::copy_n(rv.begin() + static_cast<std::ptrdiff_t>(w * steps), steps,
                    xb.begin() + static_cast<std::ptrdiff_t>(k * steps));
        std::copy_n(fv.begin() + static_cast<std::ptrdiff_t>(w * steps), steps,
                    yb.begin() + static_cast<std::ptrdiff_t>(k * steps));
      }
      auto params = model.parameters();
      Tape tape;
      tape.watch(params);
      const Tensor pred = forecast_forward(model, Tensor({n, steps, 1}, std::move(xb)));
      const Tensor loss = mean(abs(sub(pred, Tensor({n, steps}, std::move(yb)))));
      const double value = loss.item();
      if (!std::isfinite(value)) {
        throw TrainingError("forecaster loss is not finite at epoch " + std::to_string(epoch) + ", step " +
                            std::to_string(result.steps));
      }
      const auto grads = backward(loss, params);
      adam_step(opt, params, grads);
      loss_sum += value;
      ++batches;
      ++result.steps;
    }
    result.train_loss.push_back(loss_sum / static_cast<double>(batches));
    const double val = validation_mae(model, val_rain, val_flow);
    result.validation_mae.push_back(val);
    if (val < best) {
      best = val;
      since_best = 0;
      result.best_epoch = epoch;
      result.model = clone_model(model);
    } else {
      ++since_best;
    }
    result.best_validation_mae.push_back(best);
    if (config.patience > 0 && since_best >= config.patience) {
      result.stopped_early = true;
      break;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------

ForecastEvaluation evaluate_forecaster(const std::string& name, const ForecastModel& model,
                                       const WindowBatch& test, const ChannelStats& flow_stats,
                                       double peak_quantile) {
  if (test.count_of(Provenance::Real) != test.count()) throw ContractError("test set must contain only real windows");
  const Tensor pred = predict(model, channel_tensor(test, kPrecipitation));
  std::vector<double> p = pred.to_vector();
  std::vector<double> o = test.channel_values(kFlow);
  for (double& v : p) v = to_physical(v, flow_stats);
  for (double& v : o) v = to_physical(v, flow_stats);
  ForecastEvaluation eval;
  eval.name = name;
  eval.metrics = peak_event_metrics(p, o, peak_quantile);
  const std::size_t steps = test.steps();
  for (std::size_t w = 0; w < test.count(); ++w) {
    eval.window_mae.push_back(mae(std::span(p).subspan(w * steps, steps), std::span(o).subspan(w * steps, steps)));
  }
  return eval;
}

const ForecastEvaluation& ExperimentReport::row(std::string_view name) const {
  for (const auto& r : rows) {
    if (r.name == name) return r;
  }
  throw ContractError("experiment report has no row '" + std::string(name) + "'");
}

namespace {

std::string fmt(const std::optional<double>& v) {
  if (!v) return "undefined";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", *v);
  return buf;
}

}  // namespace

void ExperimentReport::write_text(std::ostream& out) const {
  out << "model        mae          dry_mae      peak_mae     peak_bias    peaks\n";
  for (const auto& r : rows) {
    char line[256];
    std::snprintf(line, sizeof(line), "%-12s %-12.6f %-12s %-12s %-12s %zu\n", r.name.c_str(), r.metrics.mae,
                  fmt(r.metrics.dry_mae).c_str(), fmt(r.metrics.peak_mae).c_str(), fmt(r.metrics.peak_bias).c_str(),
                  r.metrics.peak_count);
    out << line;
  }
  if (!rows.empty()) out << "peak threshold (physical flow): " << rows.front().metrics.threshold << "\n";
}

void ExperimentReport::write_window_csv(std::ostream& out) const {
  out << "model,window,mae\n";
  for (const auto& r : rows) {
    for (std::size_t w = 0; w < r.window_mae.size(); ++w) out << r.name << ',' << w << ',' << r.window_mae[w] << '\n';
  }
}

std::string_view arm_name(AugmentMode mode) { return mode == AugmentMode::None ? "plain" : to_string(mode); }

ValidationSplit split_validation(const WindowBatch& train, double fraction) {
  const auto held = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(train.count())));
  if (held == 0 || held >= train.count()) throw SizeError("too few training windows for a validation split");
  std::vector<std::size_t> fit_idx(train.count() - held), val_idx(held);
  std::iota(fit_idx.begin(), fit_idx.end(), std::size_t{0});
  std::iota(val_idx.begin(), val_idx.end(), fit_idx.size());
  return {train.subset(fit_idx), train.subset(val_idx)};
}

ForecastTrainResult train_augmented(const ForecastConfig& config, const AugmentationPlan& plan,
                                    const ValidationSplit& split) {
  Rng rng(derive_seed(config.seed, 0xa0 + static_cast<std::uint64_t>(plan.mode)));
  const WindowBatch set = build_training_set(split.fit, plan, rng);
  return train_forecaster(config, set, split.validation);
}

ExperimentReport compare_experiments(const ExperimentConfig& config, const WindowBatch& train, const WindowBatch& test,
                                     const ChannelStats& flow_stats, const GeneratorParams* generator) {
  const ValidationSplit split = split_validation(train, config.forecast.validation_fraction);
  std::vector<AugmentMode> arms{AugmentMode::None, AugmentMode::Oversample};
  if (config.run_gan && generator != nullptr) arms.push_back(AugmentMode::Gan);

  ExperimentReport report;
  for (const AugmentMode mode : arms) {
    AugmentationPlan plan;
    plan.mode = mode;
    plan.added_window_count = config.added_window_count;
    plan.generator = generator;
    auto trained = train_augmented(config.forecast, plan, split);
    report.rows.push_back(
        evaluate_forecaster(std::string(arm_name(mode)), trained.model, test, flow_stats, config.peak_quantile));
    report.training.push_back(std::move(trained));
  }
  return report;
}

}  // namespace tsgan
