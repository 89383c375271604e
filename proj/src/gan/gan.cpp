// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#include "tsgan/gan.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "tsgan/autodiff.hpp"
#include "tsgan/errors.hpp"
#include "tsgan/metrics.hpp"
#include "tsgan/ops.hpp"

namespace tsgan {

std::vector<Tensor> GeneratorParams::parameters() const {
  auto params = gru.parameters();
  params.push_back(head.weight);
  params.push_back(head.bias);
  return params;
}

void GeneratorParams::append_named(const std::string& prefix, std::vector<NamedTensor>& out) const {
  gru.append_named(prefix + ".gru", out);
  head.append_named(prefix + ".head", out);
  out.push_back({prefix + ".start_token", start_token});
}

std::vector<Tensor> CriticParams::parameters() const {
  auto params = gru.parameters();
  params.push_back(head.weight);
  params.push_back(head.bias);
  return params;
}

void CriticParams::append_named(const std::string& prefix, std::vector<NamedTensor>& out) const {
  gru.append_named(prefix + ".gru", out);
  head.append_named(prefix + ".head", out);
}

GeneratorParams make_generator(std::size_t channels, std::size_t hidden, std::size_t layers, Tensor start_token,
                               Rng& rng) {
  if (start_token.shape() != Shape{channels}) {
    throw ShapeError("start token must have shape (" + std::to_string(channels) + ")");
  }
  GeneratorParams gen;
  gen.gru = make_gru_stack(channels, hidden, layers, rng);
  gen.head = make_linear(hidden, channels, rng);
  gen.start_token = start_token.detach().clone();
  return gen;
}

CriticParams make_critic(std::size_t channels, std::size_t hidden, std::size_t layers, Rng& rng) {
  CriticParams critic;
  critic.gru = make_gru_stack(channels, hidden, layers, rng);
  critic.head = make_linear(hidden, 1, rng);
  return critic;
}

Tensor sample_noise(const GeneratorParams& gen, std::size_t batch, Rng& rng) {
  return normal_tensor({batch, gen.noise_dim()}, rng);
}

Tensor generate_window(const GeneratorParams& gen, const Tensor& z, std::size_t steps) {
  const std::size_t layers = gen.gru.num_layers();
  const std::size_t hidden = gen.gru.hidden_size;
  const std::size_t channels = gen.channels();
  if (z.rank() != 2 || z.dim(1) != gen.noise_dim()) {
    throw ShapeError("generate_window: expected noise (batch, " + std::to_string(gen.noise_dim()) + "), got " +
                     shape_str(z.shape()));
  }
  if (gen.gru.input_size != channels) throw ShapeError("generate_window: GRU input size differs from channel count");
  if (steps == 0) throw ShapeError("generate_window: zero steps");
  const std::size_t batch = z.dim(0);

  const GruStepper stepper(gen.gru, batch);
  std::vector<Tensor> states;
  states.reserve(layers);
  for (std::size_t l = 0; l < layers; ++l) states.push_back(slice(z, 1, l * hidden, hidden));

  Tensor x = expand(reshape(gen.start_token.detach(), {1, channels}), {batch, channels});
  std::vector<Tensor> outputs;
  outputs.reserve(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    Tensor input = x;
    for (std::size_t l = 0; l < layers; ++l) {
      states[l] = stepper.step(l, input, states[l]);
      input = states[l];
    }
    x = linear_forward(gen.head, input);
    outputs.push_back(x);
  }
  return tsgan::stack(outputs, 1);
}

Tensor critic_score(const CriticParams& critic, const Tensor& windows) {
  if (windows.rank() != 3 || windows.dim(2) != critic.gru.input_size) {
    throw ShapeError("critic: expected windows (batch, steps, " + std::to_string(critic.gru.input_size) + "), got " +
                     shape_str(windows.shape()));
  }
  const std::size_t batch = windows.dim(0);
  const std::size_t steps = windows.dim(1);
  const std::size_t layers = critic.gru.num_layers();
  const std::size_t hidden = critic.gru.hidden_size;
  const GruStepper stepper(critic.gru, batch);
  std::vector<Tensor> states(layers, Tensor::zeros({batch, hidden}));
  for (std::size_t t = 0; t < steps; ++t) {
    Tensor input = reshape(slice(windows, 1, t, 1), {batch, windows.dim(2)});
    for (std::size_t l = 0; l < layers; ++l) {
      states[l] = stepper.step(l, input, states[l]);
      input = states[l];
    }
  }
  return reshape(linear_forward(critic.head, states.back()), {batch});
}

Critic as_critic(const CriticParams& critic) {
  return [&critic](const Tensor& windows) { return critic_score(critic, windows); };
}

// ---------------------------------------------------------------------------

Tensor gradient_penalty(const Critic& critic, const Tensor& real, const Tensor& fake, Rng& rng) {
  Tape* tape = Tape::active();
  if (tape == nullptr || !recording_enabled()) {
    throw ContractError("gradient_penalty needs an active recording tape");
  }
  if (real.shape() != fake.shape() || real.rank() != 3) {
    throw ShapeError("gradient_penalty: real " + shape_str(real.shape()) + " and fake " + shape_str(fake.shape()) +
                     " must be equal rank-3 shapes");
  }
  const std::size_t batch = real.dim(0);
  const Tensor u = uniform_tensor({batch, 1, 1}, 0.0, 1.0, rng);
  const Tensor u_full = expand(u, real.shape());
  const Tensor one_minus = expand(add_scalar(neg(u), 1.0), real.shape());
  const Tensor x_hat = add(mul(u_full, real.detach()), mul(one_minus, fake.detach()));
  tape->watch(x_hat);

  const Tensor scores = critic(x_hat);
  const Tensor g = grad(sum(scores), x_hat, /*create_graph=*/true);
  for (double v : g.values()) {
    if (!std::isfinite(v)) throw TrainingError("gradient_penalty: critic gradient is not finite");
  }
  const Tensor norms = sqrt(sum(square(g), {1, 2}));
  return mean(square(add_scalar(norms, -1.0)));
}

CriticLossParts critic_loss_parts(const Critic& critic, const Tensor& real, const Tensor& fake, double lambda_gp,
                                  Rng& rng) {
  const Tensor real_score = mean(critic(real.detach()));
  const Tensor fake_score = mean(critic(fake.detach()));
  const Tensor penalty = gradient_penalty(critic, real, fake, rng);
  CriticLossParts parts;
  parts.loss = add(sub(fake_score, real_score), mul_scalar(penalty, lambda_gp));
  parts.wasserstein = real_score.item() - fake_score.item();
  parts.penalty = penalty.item();
  return parts;
}

Tensor critic_loss(const Critic& critic, const Tensor& real, const Tensor& fake, double lambda_gp, Rng& rng) {
  return critic_loss_parts(critic, real, fake, lambda_gp, rng).loss;
}

Tensor generator_loss(const Critic& critic, const Tensor& fake) { return neg(mean(critic(fake))); }

// ---------------------------------------------------------------------------

void GanTrainConfig::validate() const {
  if (!(lambda_gp > 0.0) || !std::isfinite(lambda_gp)) throw ConfigError("lambda_gp must be positive");
  if (critic_iters < 1) throw ConfigError("critic_iters must be at least 1");
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (window_len < 1) throw ConfigError("window_len must be at least 1");
  if (generator_layers < 1 || critic_layers < 1) throw ConfigError("layer counts must be at least 1");
  if (generator_hidden < 1 || critic_hidden < 1) throw ConfigError("hidden sizes must be at least 1");
  if (jsd_bins < 2) throw ConfigError("jsd_bins must be at least 2");
  if (eval_every > 0 && eval_samples < 1) throw ConfigError("eval_samples must be at least 1");
  generator_adam.validate();
  critic_adam.validate();
}

GanModel make_gan_model(const GanTrainConfig& config, const Tensor& start_token) {
  config.validate();
  Rng rng(derive_seed(config.seed, 0x6a11));
  GanModel model;
  model.config = config;
  const std::size_t channels = start_token.numel();
  model.generator = make_generator(channels, config.generator_hidden, config.generator_layers, start_token, rng);
  model.critic = make_critic(channels, config.critic_hidden, config.critic_layers, rng);
  model.generator_opt.config = config.generator_adam;
  model.critic_opt.config = config.critic_adam;
  return model;
}

Tensor sample_real(const WindowBatch& data, std::size_t batch, Rng& rng) {
  if (data.count() == 0) throw SizeError("no real windows to sample");
  std::uniform_int_distribution<std::size_t> pick(0, data.count() - 1);
  std::vector<std::size_t> idx(batch);
  for (auto& i : idx) i = pick(rng);
  return data.subset(idx).data;
}

namespace {

void require_finite(double value, const char* what, std::uint64_t step, const std::string& checkpoint) {
  if (!std::isfinite(value)) {
    throw TrainingError(std::string(what) + " is not finite at generator step " + std::to_string(step) +
                        "; last good checkpoint: " + checkpoint);
  }
}

}  // namespace

CriticLossParts critic_update(GanModel& model, const WindowBatch& data, Rng& rng) {
  const std::size_t batch = model.config.batch_size;
  const Tensor real = sample_real(data, batch, rng);
  Tensor fake;
  {
    NoGradGuard no_grad;
    fake = generate_window(model.generator, sample_noise(model.generator, batch, rng), real.dim(1));
  }
  auto params = model.critic.parameters();
  Tape tape;
  tape.watch(params);
  CriticLossParts parts = critic_loss_parts(as_critic(model.critic), real, fake, model.config.lambda_gp, rng);
  require_finite(parts.loss.item(), "critic loss", model.generator_steps, "n/a");
  const auto grads = backward(parts.loss, params);
  adam_step(model.critic_opt, params, grads);
  ++model.critic_steps;
  return parts;
}

double generator_update(GanModel& model, Rng& rng) {
  auto params = model.generator.parameters();
  Tape tape;
  tape.watch(params);
  const Tensor z = sample_noise(model.generator, model.config.batch_size, rng);
  const Tensor fake = generate_window(model.generator, z, model.config.window_len);
  const Tensor loss = generator_loss(as_critic(model.critic), fake);
  require_finite(loss.item(), "generator loss", model.generator_steps, "n/a");
  const auto grads = backward(loss, params);
  adam_step(model.generator_opt, params, grads);
  ++model.generator_steps;
  return loss.item();
}

WindowBatch generate_batch(const GeneratorParams& gen, std::span<const std::string> channels, std::size_t count,
                           Rng& rng, std::size_t chunk) {
  if (channels.size() != gen.channels()) throw ShapeError("generate_batch: channel names do not match generator");
  NoGradGuard no_grad;
  std::vector<double> values;
  values.reserve(count * kWindowLength * channels.size());
  for (std::size_t done = 0; done < count;) {
    const std::size_t n = std::min(chunk, count - done);
    const Tensor w = generate_window(gen, sample_noise(gen, n, rng));
    const auto v = w.values();
    values.insert(values.end(), v.begin(), v.end());
    done += n;
  }
  WindowBatch batch;
  batch.data = Tensor({count, kWindowLength, channels.size()}, std::move(values));
  batch.channels.assign(channels.begin(), channels.end());
  batch.provenance.assign(count, Provenance::Synthetic);
  return batch;
}

double evaluate_jsd(const GeneratorParams& gen, const WindowBatch& real, std::size_t count, std::size_t bins,
                    Rng& rng) {
  const WindowBatch fake = generate_batch(gen, real.channels, count, rng);
  return jsd(real, fake, bins).mean;
}

// ---------------------------------------------------------------------------

GanTrainer::GanTrainer(GanTrainConfig config, WindowBatch data)
    : data_(std::move(data)), rng_(derive_seed(config.seed, 0x7a1)) {
  if (data_.count() == 0) throw SizeError("GAN training needs at least one window");
  if (data_.steps() != config.window_len) {
    throw ShapeError("training windows have " + std::to_string(data_.steps()) + " steps, config expects " +
                     std::to_string(config.window_len));
  }
  model_ = make_gan_model(config, compute_start_token(data_));
}

void GanTrainer::train(std::size_t steps) {
  const auto& cfg = model_.config;
  for (std::size_t s = 0; s < steps; ++s) {
    GanLogEntry entry;
    for (std::size_t k = 0; k < cfg.critic_iters; ++k) {
      CriticLossParts parts;
      try {
        parts = critic_update(model_, data_, rng_);
      } catch (const TrainingError& e) {
        throw TrainingError(std::string(e.what()) + " (last good checkpoint: " + last_checkpoint_ + ")");
      }
      entry.critic_loss = parts.loss.item();
      entry.wasserstein = parts.wasserstein;
      entry.penalty = parts.penalty;
    }
    try {
      entry.generator_loss = generator_update(model_, rng_);
    } catch (const TrainingError& e) {
      throw TrainingError(std::string(e.what()) + " (last good checkpoint: " + last_checkpoint_ + ")");
    }
    entry.step = model_.generator_steps;
    if (cfg.eval_every > 0 && entry.step % cfg.eval_every == 0) {
      // Separate stream so evaluation never perturbs the training sequence.
      Rng eval_rng(derive_seed(cfg.seed, 0xe7a1000000ULL + entry.step));
      entry.jsd = evaluate_jsd(model_.generator, data_, cfg.eval_samples, cfg.jsd_bins, eval_rng);
    }
    log_.push_back(entry);
    if (hook_ && cfg.checkpoint_every > 0 && entry.step % cfg.checkpoint_every == 0) last_checkpoint_ = hook_(*this);
  }
}

std::optional<double> GanTrainer::last_jsd() const {
  for (auto it = log_.rbegin(); it != log_.rend(); ++it) {
    if (it->jsd) return it->jsd;
  }
  return std::nullopt;
}

double GanTrainer::evaluate_now() {
  Rng eval_rng(derive_seed(model_.config.seed, 0xe7a1000000ULL + model_.generator_steps));
  return evaluate_jsd(model_.generator, data_, model_.config.eval_samples, model_.config.jsd_bins, eval_rng);
}

std::string GanTrainer::rng_state() const {
  std::ostringstream out;
  out << rng_;
  return out.str();
}

void GanTrainer::set_rng_state(const std::string& state) {
  std::istringstream in(state);
  in >> rng_;
  if (!in) throw FormatError("malformed RNG state");
}

}  // namespace tsgan
