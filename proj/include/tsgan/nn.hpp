// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tsgan/random.hpp"
#include "tsgan/tensor.hpp"

namespace tsgan {

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

// ---------------------------------------------------------------------------
// Fully connected

struct LinearLayer {
  Tensor weight;  // (out, in)
  Tensor bias;    // (out)

  std::size_t in_features() const { return weight.dim(1); }
  std::size_t out_features() const { return weight.dim(0); }
  std::vector<Tensor> parameters() const { return {weight, bias}; }
  void append_named(const std::string& prefix, std::vector<NamedTensor>& out) const;
};

/// x (batch, in) -> x * weight^T + bias, shape (batch, out).
Tensor linear_forward(const LinearLayer& layer, const Tensor& x);

// ---------------------------------------------------------------------------
// Recurrent stacks

/// Input and recurrent projections of one recurrent layer. Gate blocks are
/// stacked along the rows: GRU uses (reset, update, candidate), LSTM uses
/// (input, forget, cell, output).
struct RecurrentLayer {
  Tensor w_ih;  // (gates*hidden, in)
  Tensor w_hh;  // (gates*hidden, hidden)
  Tensor b_ih;  // (gates*hidden)
  Tensor b_hh;  // (gates*hidden)

  std::vector<Tensor> parameters() const { return {w_ih, w_hh, b_ih, b_hh}; }
  void append_named(const std::string& prefix, std::vector<NamedTensor>& out) const;
};

struct GruStack {
  std::size_t input_size = 0;
  std::size_t hidden_size = 0;
  std::vector<RecurrentLayer> layers;

  std::size_t num_layers() const { return layers.size(); }
  std::vector<Tensor> parameters() const;
  void append_named(const std::string& prefix, std::vector<NamedTensor>& out) const;
};

struct LstmStack {
  std::size_t input_size = 0;
  std::size_t hidden_size = 0;
  std::vector<RecurrentLayer> layers;

  std::size_t num_layers() const { return layers.size(); }
  std::vector<Tensor> parameters() const;
  void append_named(const std::string& prefix, std::vector<NamedTensor>& out) const;
};

struct RecurrentOutput {
  Tensor outputs;      // (batch, steps, hidden), top layer
  Tensor final_state;  // (layers, batch, hidden)
};

/// One GRU step with the candidate computed as
/// n = tanh(W_n x + b_in + r * (U_n h + b_hn)) and h' = (1 - z) * n + z * h.
Tensor gru_cell(const RecurrentLayer& layer, const Tensor& x, const Tensor& h);

/// A GRU stack bound to one batch size, with biases broadcast once so that
/// repeated steps (autoregressive generation) do not re-expand them.
class GruStepper {
 public:
  GruStepper(const GruStack& stack, std::size_t batch);

  /// Advances layer `layer` from state h (batch, hidden) with input x.
  Tensor step(std::size_t layer, const Tensor& x, const Tensor& h) const;

 private:
  const GruStack* stack_;
  std::vector<Tensor> b_ih_;
  std::vector<Tensor> b_hh_;
};

/// Runs the stack over inputs (batch, steps, in) from initial states
/// h0 (layers, batch, hidden).
RecurrentOutput gru_forward(const GruStack& stack, const Tensor& inputs, const Tensor& h0);

/// LSTM over inputs (batch, steps, in) starting from zero hidden and cell state.
RecurrentOutput lstm_forward(const LstmStack& stack, const Tensor& inputs);

// ---------------------------------------------------------------------------
// Initialization

/// Weights ~ Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) with fan_in = in.
Tensor init_weight(std::size_t out, std::size_t in, Rng& rng);

LinearLayer make_linear(std::size_t in, std::size_t out, Rng& rng);
GruStack make_gru_stack(std::size_t input_size, std::size_t hidden_size, std::size_t num_layers, Rng& rng);
LstmStack make_lstm_stack(std::size_t input_size, std::size_t hidden_size, std::size_t num_layers, Rng& rng);

/// Sets every value of every tensor to zero in place.
void zero_parameters(std::span<Tensor> params);

// ---------------------------------------------------------------------------
// Adam

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  /// lr 1e-4, beta1 0, beta2 0.9: the usual WGAN-GP settings.
  static AdamConfig gan_defaults() { return {1e-4, 0.0, 0.9, 1e-8}; }
  void validate() const;
};

struct AdamState {
  AdamConfig config;
  std::uint64_t step_count = 0;
  std::vector<Tensor> first_moment;
  std::vector<Tensor> second_moment;
};

/// In-place Adam update with bias correction. Moments are created on the first
/// step. Throws TrainingError, leaving params and state untouched, when any
/// gradient is not finite.
void adam_step(AdamState& state, std::span<Tensor> params, std::span<const Tensor> grads);

}  // namespace tsgan
