// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tsgan/data.hpp"
#include "tsgan/nn.hpp"
#include "tsgan/random.hpp"
#include "tsgan/tensor.hpp"

namespace tsgan {

// ---------------------------------------------------------------------------
// Networks

/// Autoregressive GRU generator. The noise vector is split into one initial
/// hidden state per layer, so noise_dim = layers * hidden.
struct GeneratorParams {
  GruStack gru;
  LinearLayer head;   // hidden -> channels
  Tensor start_token;  // (channels); a data statistic, never trained

  std::size_t channels() const { return head.out_features(); }
  std::size_t noise_dim() const { return gru.num_layers() * gru.hidden_size; }
  /// Trainable tensors only (the start token is excluded).
  std::vector<Tensor> parameters() const;
  void append_named(const std::string& prefix, std::vector<NamedTensor>& out) const;
};

struct CriticParams {
  GruStack gru;
  LinearLayer head;  // hidden -> 1

  std::vector<Tensor> parameters() const;
  void append_named(const std::string& prefix, std::vector<NamedTensor>& out) const;
};

GeneratorParams make_generator(std::size_t channels, std::size_t hidden, std::size_t layers, Tensor start_token,
                               Rng& rng);
CriticParams make_critic(std::size_t channels, std::size_t hidden, std::size_t layers, Rng& rng);

/// Standard normal noise (batch, noise_dim).
Tensor sample_noise(const GeneratorParams& gen, std::size_t batch, Rng& rng);

/// Windows (batch, steps, channels). Step 0 is fed the start token; every
/// produced step is fed back as the next input. The start token is not part
/// of the output.
Tensor generate_window(const GeneratorParams& gen, const Tensor& z, std::size_t steps = kWindowLength);

/// Score (batch) from the head applied to the top layer's final hidden state.
Tensor critic_score(const CriticParams& critic, const Tensor& windows);

/// Any differentiable map from windows (batch, steps, channels) to scores (batch).
using Critic = std::function<Tensor(const Tensor&)>;
Critic as_critic(const CriticParams& critic);

// ---------------------------------------------------------------------------
// Losses

/// mean_b (||grad D(x_hat_b)|| - 1)^2 with x_hat = u real + (1 - u) fake and one
/// u ~ U(0, 1) per sample. The inner gradient is taken with create_graph, so
/// the result is differentiable in the critic parameters. Requires an active,
/// recording tape (ContractError otherwise); TrainingError when the inner
/// gradient is not finite.
Tensor gradient_penalty(const Critic& critic, const Tensor& real, const Tensor& fake, Rng& rng);

struct CriticLossParts {
  Tensor loss;  // mean D(fake) - mean D(real) + lambda * penalty
  double wasserstein = 0.0;  // mean D(real) - mean D(fake)
  double penalty = 0.0;
};

CriticLossParts critic_loss_parts(const Critic& critic, const Tensor& real, const Tensor& fake, double lambda_gp,
                                  Rng& rng);
Tensor critic_loss(const Critic& critic, const Tensor& real, const Tensor& fake, double lambda_gp, Rng& rng);

/// -mean D(fake).
Tensor generator_loss(const Critic& critic, const Tensor& fake);

// ---------------------------------------------------------------------------
// Training

struct GanTrainConfig {
  double lambda_gp = 10.0;
  std::size_t critic_iters = 5;
  std::size_t batch_size = 64;
  std::size_t window_len = kWindowLength;
  std::size_t generator_layers = 3;
  std::size_t generator_hidden = 450;
  std::size_t critic_layers = 3;
  std::size_t critic_hidden = 120;
  AdamConfig generator_adam = AdamConfig::gan_defaults();
  AdamConfig critic_adam = AdamConfig::gan_defaults();
  std::uint64_t seed = 0;
  std::size_t eval_every = 100;  // 0 disables periodic JSD
  std::size_t eval_samples = 512;
  std::size_t jsd_bins = 50;
  std::size_t checkpoint_every = 0;  // 0 disables the checkpoint hook

  void validate() const;
};

struct GanLogEntry {
  std::uint64_t step = 0;  // generator steps completed
  double critic_loss = 0.0;  // last critic iteration of this step
  double wasserstein = 0.0;
  double penalty = 0.0;
  double generator_loss = 0.0;
  std::optional<double> jsd;
};

struct GanModel {
  GanTrainConfig config;
  GeneratorParams generator;
  CriticParams critic;
  AdamState generator_opt;
  AdamState critic_opt;
  std::uint64_t generator_steps = 0;
  std::uint64_t critic_steps = 0;
};

/// Builds a model for `channels` from the config and seed.
GanModel make_gan_model(const GanTrainConfig& config, const Tensor& start_token);

/// Real windows sampled uniformly with replacement.
Tensor sample_real(const WindowBatch& data, std::size_t batch, Rng& rng);

/// One critic update (fake generated without recording); returns its loss parts.
CriticLossParts critic_update(GanModel& model, const WindowBatch& data, Rng& rng);
/// One generator update; returns the generator loss.
double generator_update(GanModel& model, Rng& rng);

/// Mean per-channel JSD between `count` fresh windows and all of `real`.
double evaluate_jsd(const GeneratorParams& gen, const WindowBatch& real, std::size_t count, std::size_t bins,
                    Rng& rng);

/// Fresh windows as a batch tagged synthetic; runs without recording.
WindowBatch generate_batch(const GeneratorParams& gen, std::span<const std::string> channels, std::size_t count,
                           Rng& rng, std::size_t chunk = 256);

/// Alternating WGAN-GP optimization, resumable in increments of generator steps.
class GanTrainer {
 public:
  /// Returns a description (usually a path) of the checkpoint it wrote.
  using CheckpointHook = std::function<std::string(const GanTrainer&)>;

  GanTrainer(GanTrainConfig config, WindowBatch data);

  /// Runs `steps` more generator steps (each preceded by critic_iters critic
  /// updates). Throws TrainingError on a non-finite loss, naming the last
  /// checkpoint written by the hook.
  void train(std::size_t steps);
  void set_checkpoint_hook(CheckpointHook hook) { hook_ = std::move(hook); }

  const GanModel& model() const { return model_; }
  GanModel& model() { return model_; }
  const WindowBatch& data() const { return data_; }
  const std::vector<GanLogEntry>& log() const { return log_; }
  /// Most recent periodic JSD, if any has been computed.
  std::optional<double> last_jsd() const;
  double evaluate_now();

  /// Serialized state of the training RNG (std::mt19937_64 text form).
  std::string rng_state() const;
  void set_rng_state(const std::string& state);

 private:
  GanModel model_;
  WindowBatch data_;
  Rng rng_;
  std::vector<GanLogEntry> log_;
  CheckpointHook hook_;
  std::string last_checkpoint_ = "none";
};

}  // namespace tsgan
