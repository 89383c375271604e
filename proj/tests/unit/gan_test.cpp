// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "tsgan/autodiff.hpp"
#include "tsgan/errors.hpp"
#include "tsgan/gan.hpp"
#include "tsgan/gradcheck.hpp"
#include "tsgan/ops.hpp"

namespace tsgan {
namespace {

using ::testing::Each;

Critic linear_critic(const Tensor& w) {
  return [w](const Tensor& x) {
    const std::size_t b = x.dim(0);
    return reshape(matmul(reshape(x, {b, x.numel() / b}), reshape(w, {w.numel(), 1})), {b});
  };
}

Tensor weights_with_norm(Shape shape, double norm, Rng& rng) {
  Tensor w = normal_tensor(std::move(shape), rng);
  double sq = 0.0;
  for (double v : w.values()) sq += v * v;
  for (double& v : w.mutable_values()) v *= norm / std::sqrt(sq);
  return w;
}

std::vector<Tensor> clones(const std::vector<Tensor>& ts) {
  std::vector<Tensor> out;
  for (const auto& t : ts) out.push_back(t.clone());
  return out;
}

bool all_bitwise_equal(const std::vector<Tensor>& a, const std::vector<Tensor>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].bitwise_equal(b[i])) return false;
  }
  return true;
}

// --- Generator -------------------------------------------------------------

TEST(GeneratorTest, ShapeAndDeterminism) {
  Rng rng(1);
  const auto gen = make_generator(2, 8, 2, Tensor::vector({0.1, -0.2}), rng);
  EXPECT_EQ(gen.noise_dim(), 16u);
  Rng za(5), zb(5);
  const Tensor a = generate_window(gen, sample_noise(gen, 3, za));
  const Tensor b = generate_window(gen, sample_noise(gen, 3, zb));
  EXPECT_EQ(a.shape(), (Shape{3, 24, 2}));
  EXPECT_TRUE(a.bitwise_equal(b));
  EXPECT_THROW(generate_window(gen, Tensor::zeros({3, 15})), ShapeError);
}

TEST(GeneratorTest, ZeroParametersEmitHeadBias) {
  Rng rng(2);
  auto gen = make_generator(2, 4, 3, Tensor::vector({1.5, -3.0}), rng);
  auto params = gen.parameters();
  zero_parameters(params);
  const Tensor w = generate_window(gen, normal_tensor({4, gen.noise_dim()}, rng, 0.0, 3.0));
  EXPECT_THAT(w.to_vector(), Each(0.0));
}

TEST(GeneratorTest, StartTokenIsNotTrainable) {
  Rng rng(3);
  const auto gen = make_generator(2, 4, 1, Tensor::vector({0.5, 0.5}), rng);
  for (const auto& p : gen.parameters()) EXPECT_FALSE(p.same_storage(gen.start_token));
  EXPECT_EQ(gen.parameters().size(), 6u);
}

TEST(CriticTest, OneScorePerWindow) {
  Rng rng(4);
  const auto critic = make_critic(2, 5, 2, rng);
  EXPECT_EQ(critic_score(critic, normal_tensor({7, 24, 2}, rng)).shape(), (Shape{7}));
  EXPECT_THROW(critic_score(critic, normal_tensor({7, 24, 3}, rng)), ShapeError);
}

// --- Gradient penalty ------------------------------------------------------

TEST(PenaltyTest, LinearCriticOracle) {
  Rng rng(5);
  for (int pair = 0; pair < 20; ++pair) {
    const Tensor real = normal_tensor({6, 24, 2}, rng);
    const Tensor fake = normal_tensor({6, 24, 2}, rng, 1.0, 2.0);
    for (double norm : {1.0, 5.0, 0.25}) {
      const Tensor w = weights_with_norm({24, 2}, norm, rng);
      Tape tape;
      const double gp = gradient_penalty(linear_critic(w), real, fake, rng).item();
      EXPECT_NEAR(gp, (norm - 1.0) * (norm - 1.0), 1e-9);
    }
  }
}

TEST(PenaltyTest, IdenticalBatchesIgnoreInterpolation) {
  Rng rng(6);
  const auto critic = make_critic(2, 4, 1, rng);
  const Tensor real = normal_tensor({5, 24, 2}, rng);
  Rng u1(1), u2(999);
  Tape tape;
  const double a = gradient_penalty(as_critic(critic), real, real, u1).item();
  const double b = gradient_penalty(as_critic(critic), real, real, u2).item();
  EXPECT_EQ(a, b);
}

TEST(PenaltyTest, RequiresRecordingTape) {
  Rng rng(7);
  const Tensor x = normal_tensor({2, 3, 2}, rng);
  const Tensor w = weights_with_norm({3, 2}, 1.0, rng);
  EXPECT_THROW(gradient_penalty(linear_critic(w), x, x, rng), ContractError);
  Tape tape;
  NoGradGuard guard;
  EXPECT_THROW(gradient_penalty(linear_critic(w), x, x, rng), ContractError);
}

TEST(PenaltyTest, SecondOrderGradientMatchesFiniteDifferences) {
  Rng rng(8);
  const auto critic = make_critic(2, 3, 1, rng);
  const Tensor real = normal_tensor({2, 3, 2}, rng);
  const Tensor fake = normal_tensor({2, 3, 2}, rng);
  auto params = critic.parameters();
  // Biases start at zero; move them off it so every path is exercised.
  for (auto& p : params) {
    for (double& v : p.mutable_values()) v += 0.3 * std::sin(7.0 * v + 1.0);
  }
  const ScalarFn f = [&](std::span<const Tensor> in) {
    CriticParams c = critic;
    c.gru.layers[0] = {in[0], in[1], in[2], in[3]};
    c.head = {in[4], in[5]};
    Rng u(77);
    return gradient_penalty(as_critic(c), real, fake, u);
  };
  EXPECT_LT(max_gradient_error(f, params), 1e-4);
}

// --- Losses ----------------------------------------------------------------

TEST(LossTest, ConstantCritic) {
  Rng rng(9);
  const Tensor real = normal_tensor({4, 24, 2}, rng);
  const Tensor fake = normal_tensor({4, 24, 2}, rng);
  // Constant in value but still a function of x, so the penalty sees a zero gradient.
  const Critic constant = [](const Tensor& x) {
    return add_scalar(mul_scalar(sum(x, {1, 2}), 0.0), 2.5);
  };
  Tape tape;
  EXPECT_NEAR(critic_loss(constant, real, fake, 10.0, rng).item(), 10.0, 1e-12);

  auto gen = make_generator(2, 4, 1, Tensor::vector({0, 0}), rng);
  auto params = gen.parameters();
  Tape gtape;
  gtape.watch(params);
  const Tensor loss = generator_loss(constant, generate_window(gen, sample_noise(gen, 3, rng)));
  EXPECT_EQ(loss.item(), -2.5);
  for (const auto& g : backward(loss, params)) EXPECT_THAT(g.to_vector(), Each(0.0));
}

TEST(LossTest, ZeroLambdaZeroScores) {
  Rng rng(10);
  const Critic zero = [](const Tensor& x) { return mul_scalar(sum(x, {1, 2}), 0.0); };
  Tape tape;
  EXPECT_EQ(critic_loss(zero, normal_tensor({3, 4, 2}, rng), normal_tensor({3, 4, 2}, rng), 0.0, rng).item(), 0.0);
}

TEST(LossTest, GeneratorLossDecreasesWithScore) {
  const Tensor fake = Tensor::ones({2, 3, 1});
  double previous = 1e300;
  for (double c : {-1.0, 0.0, 0.5, 3.0}) {
    const Critic critic = [c](const Tensor& x) { return mul_scalar(sum(x, {1, 2}), c); };
    const double loss = generator_loss(critic, fake).item();
    EXPECT_LT(loss, previous);
    previous = loss;
  }
}

// --- Training --------------------------------------------------------------

WindowBatch toy_windows(std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, 0.1);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::vector<double> v;
  for (std::size_t w = 0; w < count; ++w) {
    const double p = phase(rng);
    for (std::size_t t = 0; t < 24; ++t) {
      v.push_back(std::sin(p + 0.3 * static_cast<double>(t)) + noise(rng));
      v.push_back(0.5 * std::cos(p + 0.3 * static_cast<double>(t)) + noise(rng));
    }
  }
  return {Tensor({count, 24, 2}, v), {"a", "b"}, std::vector<Provenance>(count, Provenance::Real)};
}

GanTrainConfig tiny_config() {
  GanTrainConfig cfg;
  cfg.generator_layers = 1;
  cfg.generator_hidden = 8;
  cfg.critic_layers = 1;
  cfg.critic_hidden = 6;
  cfg.batch_size = 8;
  cfg.eval_every = 5;
  cfg.eval_samples = 32;
  cfg.seed = 3;
  return cfg;
}

TEST(TrainTest, UpdatesTouchOnlyTheirOwnNetwork) {
  const auto data = toy_windows(40, 1);
  GanModel model = make_gan_model(tiny_config(), compute_start_token(data));
  Rng rng(4);
  auto gen_before = clones(model.generator.parameters());
  auto critic_before = clones(model.critic.parameters());
  critic_update(model, data, rng);
  EXPECT_TRUE(all_bitwise_equal(model.generator.parameters(), gen_before));
  EXPECT_FALSE(all_bitwise_equal(model.critic.parameters(), critic_before));

  critic_before = clones(model.critic.parameters());
  generator_update(model, rng);
  EXPECT_TRUE(all_bitwise_equal(model.critic.parameters(), critic_before));
  EXPECT_FALSE(all_bitwise_equal(model.generator.parameters(), gen_before));
}

TEST(TrainTest, StepCountsAndReplay) {
  const auto data = toy_windows(40, 2);
  GanTrainer a(tiny_config(), data);
  GanTrainer b(tiny_config(), data);
  a.train(4);
  a.train(6);  // resuming in pieces matches one run
  b.train(10);
  EXPECT_EQ(a.model().generator_steps, 10u);
  EXPECT_EQ(a.model().critic_steps, 50u);
  ASSERT_EQ(a.log().size(), b.log().size());
  for (std::size_t i = 0; i < a.log().size(); ++i) {
    EXPECT_EQ(a.log()[i].critic_loss, b.log()[i].critic_loss);
    EXPECT_EQ(a.log()[i].generator_loss, b.log()[i].generator_loss);
    EXPECT_EQ(a.log()[i].jsd.has_value(), (i + 1) % 5 == 0);
  }
  EXPECT_TRUE(all_bitwise_equal(a.model().generator.parameters(), b.model().generator.parameters()));
  EXPECT_TRUE(a.model().generator.start_token.bitwise_equal(compute_start_token(data)));
}

TEST(TrainTest, CriticLossFallsDuringEarlyTraining) {
  const auto data = toy_windows(200, 3);
  auto cfg = tiny_config();
  cfg.eval_every = 0;
  GanTrainer trainer(cfg, data);
  trainer.train(200);
  auto average = [&](std::size_t from, std::size_t to) {
    double s = 0.0;
    for (std::size_t i = from; i < to; ++i) s += trainer.log()[i].critic_loss;
    return s / static_cast<double>(to - from);
  };
  EXPECT_LT(average(150, 200), average(0, 50));
}

TEST(TrainTest, NonFiniteLossAbortsWithCheckpointReference) {
  const auto data = toy_windows(20, 4);
  auto cfg = tiny_config();
  cfg.checkpoint_every = 1;
  GanTrainer trainer(cfg, data);
  trainer.set_checkpoint_hook([](const GanTrainer& t) { return "ckpt-" + std::to_string(t.model().generator_steps); });
  trainer.train(2);
  trainer.model().critic.head.bias.mutable_values()[0] = std::nan("");
  try {
    trainer.train(1);
    FAIL() << "expected TrainingError";
  } catch (const TrainingError& e) {
    EXPECT_THAT(e.what(), ::testing::HasSubstr("ckpt-2"));
  }
}

TEST(TrainTest, ConfigValidation) {
  auto cfg = tiny_config();
  cfg.lambda_gp = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = tiny_config();
  cfg.critic_iters = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

}  // namespace
}  // namespace tsgan
