// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#include <algorithm>
#include <cmath>
#include <string>

#include "tsgan/errors.hpp"
#include "tsgan/nn.hpp"

namespace tsgan {
namespace {

RecurrentLayer make_recurrent_layer(std::size_t gates, std::size_t in, std::size_t hidden, Rng& rng) {
  RecurrentLayer layer;
  layer.w_ih = init_weight(gates * hidden, in, rng);
  layer.w_hh = init_weight(gates * hidden, hidden, rng);
  layer.b_ih = Tensor::zeros({gates * hidden});
  layer.b_hh = Tensor::zeros({gates * hidden});
  return layer;
}

template <class Stack>
Stack make_stack(std::size_t gates, std::size_t input_size, std::size_t hidden_size, std::size_t num_layers,
                 Rng& rng) {
  if (input_size == 0 || hidden_size == 0 || num_layers == 0) {
    throw ConfigError("recurrent stack needs positive input size, hidden size and layer count");
  }
  Stack stack;
  stack.input_size = input_size;
  stack.hidden_size = hidden_size;
  for (std::size_t l = 0; l < num_layers; ++l) {
    stack.layers.push_back(make_recurrent_layer(gates, l == 0 ? input_size : hidden_size, hidden_size, rng));
  }
  return stack;
}

}  // namespace

Tensor init_weight(std::size_t out, std::size_t in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  return uniform_tensor({out, in}, -bound, bound, rng);
}

LinearLayer make_linear(std::size_t in, std::size_t out, Rng& rng) {
  return {init_weight(out, in, rng), Tensor::zeros({out})};
}

GruStack make_gru_stack(std::size_t input_size, std::size_t hidden_size, std::size_t num_layers, Rng& rng) {
  return make_stack<GruStack>(3, input_size, hidden_size, num_layers, rng);
}

LstmStack make_lstm_stack(std::size_t input_size, std::size_t hidden_size, std::size_t num_layers, Rng& rng) {
  return make_stack<LstmStack>(4, input_size, hidden_size, num_layers, rng);
}

void zero_parameters(std::span<Tensor> params) {
  for (auto& p : params) std::fill(p.mutable_values().begin(), p.mutable_values().end(), 0.0);
}

void AdamConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("adam: learning rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("adam: betas must lie in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw ConfigError("adam: epsilon must be positive");
}

void adam_step(AdamState& state, std::span<Tensor> params, std::span<const Tensor> grads) {
  if (params.size() != grads.size()) throw ShapeError("adam: parameter and gradient counts differ");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].shape() != grads[i].shape()) {
      throw ShapeError("adam: gradient " + std::to_string(i) + " has shape " + shape_str(grads[i].shape()) +
                       ", parameter has " + shape_str(params[i].shape()));
    }
    for (double g : grads[i].values()) {
      if (!std::isfinite(g)) throw TrainingError("adam: non-finite gradient in parameter " + std::to_string(i));
    }
  }
  if (state.step_count == 0 && state.first_moment.empty()) {
    for (const auto& p : params) {
      state.first_moment.push_back(Tensor::zeros(p.shape()));
      state.second_moment.push_back(Tensor::zeros(p.shape()));
    }
  }
  if (state.first_moment.size() != params.size()) throw ShapeError("adam: state does not match parameters");

  const auto& cfg = state.config;
  const auto t = static_cast<double>(++state.step_count);
  const double correction1 = 1.0 - std::pow(cfg.beta1, t);
  const double correction2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i].mutable_values();
    auto m = state.first_moment[i].mutable_values();
    auto v = state.second_moment[i].mutable_values();
    const auto g = grads[i].values();
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * g[j];
      v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * g[j] * g[j];
      const double m_hat = m[j] / correction1;
      const double v_hat = v[j] / correction2;
      p[j] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
  }
}

}  // namespace tsgan
