// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#include <string>

#include "tsgan/errors.hpp"
#include "tsgan/nn.hpp"
#include "tsgan/ops.hpp"

namespace tsgan {
namespace {

Tensor row_bias(const Tensor& bias, std::size_t batch) {
  return expand(reshape(bias, {1, bias.numel()}), {batch, bias.numel()});
}

// Input and recurrent pre-activations of every gate, biases included.
struct GatePreActivations {
  Tensor input;
  Tensor recurrent;
};

GatePreActivations project(const RecurrentLayer& layer, const Tensor& x, const Tensor& h,
                           const Tensor& b_ih, const Tensor& b_hh) {
  return {add(matmul(x, layer.w_ih, false, true), b_ih), add(matmul(h, layer.w_hh, false, true), b_hh)};
}

Tensor gru_step(const RecurrentLayer& layer, const Tensor& x, const Tensor& h, const Tensor& b_ih,
                const Tensor& b_hh, std::size_t hidden) {
  const auto pre = project(layer, x, h, b_ih, b_hh);
  const Tensor r = sigmoid(add(slice(pre.input, 1, 0, hidden), slice(pre.recurrent, 1, 0, hidden)));
  const Tensor z = sigmoid(add(slice(pre.input, 1, hidden, hidden), slice(pre.recurrent, 1, hidden, hidden)));
  const Tensor n = tanh(add(slice(pre.input, 1, 2 * hidden, hidden), mul(r, slice(pre.recurrent, 1, 2 * hidden, hidden))));
  // (1 - z) * n + z * h == n + z * (h - n)
  return add(n, mul(z, sub(h, n)));
}

void check_recurrent_layer(const RecurrentLayer& layer, std::size_t gates, std::size_t in, std::size_t hidden,
                           const char* what) {
  const Shape w_ih{gates * hidden, in};
  const Shape w_hh{gates * hidden, hidden};
  const Shape b{gates * hidden};
  if (layer.w_ih.shape() != w_ih || layer.w_hh.shape() != w_hh || layer.b_ih.shape() != b ||
      layer.b_hh.shape() != b) {
    throw ShapeError(std::string(what) + ": layer parameters do not match input " + std::to_string(in) +
                     " / hidden " + std::to_string(hidden));
  }
}

void check_sequence(const Tensor& inputs, std::size_t input_size, const char* what) {
  if (inputs.rank() != 3 || inputs.dim(2) != input_size) {
    throw ShapeError(std::string(what) + ": expected inputs (batch, steps, " + std::to_string(input_size) +
                     "), got " + shape_str(inputs.shape()));
  }
  if (inputs.dim(1) == 0) throw ShapeError(std::string(what) + ": zero-length sequence");
}

Tensor step_input(const Tensor& inputs, std::size_t t) {
  return reshape(slice(inputs, 1, t, 1), {inputs.dim(0), inputs.dim(2)});
}

}  // namespace

void LinearLayer::append_named(const std::string& prefix, std::vector<NamedTensor>& out) const {
  out.push_back({prefix + ".weight", weight});
  out.push_back({prefix + ".bias", bias});
}

Tensor linear_forward(const LinearLayer& layer, const Tensor& x) {
  if (x.rank() != 2 || x.dim(1) != layer.in_features()) {
    throw ShapeError("linear: expected (batch, " + std::to_string(layer.in_features()) + "), got " +
                     shape_str(x.shape()));
  }
  if (layer.bias.shape() != Shape{layer.out_features()}) throw ShapeError("linear: bias shape mismatch");
  return add(matmul(x, layer.weight, false, true), row_bias(layer.bias, x.dim(0)));
}

void RecurrentLayer::append_named(const std::string& prefix, std::vector<NamedTensor>& out) const {
  out.push_back({prefix + ".w_ih", w_ih});
  out.push_back({prefix + ".w_hh", w_hh});
  out.push_back({prefix + ".b_ih", b_ih});
  out.push_back({prefix + ".b_hh", b_hh});
}

namespace {

template <class Stack>
std::vector<Tensor> stack_parameters(const Stack& stack) {
  std::vector<Tensor> out;
  for (const auto& layer : stack.layers) {
    for (auto& p : layer.parameters()) out.push_back(p);
  }
  return out;
}

template <class Stack>
void stack_named(const Stack& stack, const std::string& prefix, std::vector<NamedTensor>& out) {
  for (std::size_t l = 0; l < stack.layers.size(); ++l) {
    stack.layers[l].append_named(prefix + "." + std::to_string(l), out);
  }
}

}  // namespace

std::vector<Tensor> GruStack::parameters() const { return stack_parameters(*this); }
void GruStack::append_named(const std::string& prefix, std::vector<NamedTensor>& out) const {
  stack_named(*this, prefix, out);
}
std::vector<Tensor> LstmStack::parameters() const { return stack_parameters(*this); }
void LstmStack::append_named(const std::string& prefix, std::vector<NamedTensor>& out) const {
  stack_named(*this, prefix, out);
}

Tensor gru_cell(const RecurrentLayer& layer, const Tensor& x, const Tensor& h) {
  const std::size_t hidden = h.dim(1);
  check_recurrent_layer(layer, 3, x.dim(1), hidden, "gru_cell");
  if (x.dim(0) != h.dim(0)) throw ShapeError("gru_cell: batch mismatch");
  return gru_step(layer, x, h, row_bias(layer.b_ih, x.dim(0)), row_bias(layer.b_hh, x.dim(0)), hidden);
}

GruStepper::GruStepper(const GruStack& stack, std::size_t batch) : stack_(&stack) {
  if (stack.num_layers() == 0) throw ShapeError("gru: empty stack");
  for (std::size_t l = 0; l < stack.num_layers(); ++l) {
    check_recurrent_layer(stack.layers[l], 3, l == 0 ? stack.input_size : stack.hidden_size, stack.hidden_size,
                          "gru");
    b_ih_.push_back(row_bias(stack.layers[l].b_ih, batch));
    b_hh_.push_back(row_bias(stack.layers[l].b_hh, batch));
  }
}

Tensor GruStepper::step(std::size_t layer, const Tensor& x, const Tensor& h) const {
  return gru_step(stack_->layers[layer], x, h, b_ih_[layer], b_hh_[layer], stack_->hidden_size);
}

RecurrentOutput gru_forward(const GruStack& stack, const Tensor& inputs, const Tensor& h0) {
  check_sequence(inputs, stack.input_size, "gru_forward");
  const std::size_t batch = inputs.dim(0);
  const std::size_t steps = inputs.dim(1);
  const std::size_t hidden = stack.hidden_size;
  const std::size_t layers = stack.num_layers();
  if (h0.shape() != Shape{layers, batch, hidden}) {
    throw ShapeError("gru_forward: expected h0 " + shape_str({layers, batch, hidden}) + ", got " +
                     shape_str(h0.shape()));
  }
  const GruStepper stepper(stack, batch);
  std::vector<Tensor> states;
  for (std::size_t l = 0; l < layers; ++l) states.push_back(reshape(slice(h0, 0, l, 1), {batch, hidden}));

  std::vector<Tensor> outputs;
  outputs.reserve(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    Tensor x = step_input(inputs, t);
    for (std::size_t l = 0; l < layers; ++l) {
      states[l] = stepper.step(l, x, states[l]);
      x = states[l];
    }
    outputs.push_back(x);
  }
  return {tsgan::stack(outputs, 1), tsgan::stack(states, 0)};
}

RecurrentOutput lstm_forward(const LstmStack& stack, const Tensor& inputs) {
  check_sequence(inputs, stack.input_size, "lstm_forward");
  const std::size_t batch = inputs.dim(0);
  const std::size_t steps = inputs.dim(1);
  const std::size_t hidden = stack.hidden_size;
  const std::size_t layers = stack.num_layers();
  if (layers == 0) throw ShapeError("lstm_forward: empty stack");

  std::vector<Tensor> h(layers, Tensor::zeros({batch, hidden}));
  std::vector<Tensor> c(layers, Tensor::zeros({batch, hidden}));
  std::vector<Tensor> b_ih;
  std::vector<Tensor> b_hh;
  for (std::size_t l = 0; l < layers; ++l) {
    check_recurrent_layer(stack.layers[l], 4, l == 0 ? stack.input_size : hidden, hidden, "lstm_forward");
    b_ih.push_back(row_bias(stack.layers[l].b_ih, batch));
    b_hh.push_back(row_bias(stack.layers[l].b_hh, batch));
  }

  std::vector<Tensor> outputs;
  outputs.reserve(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    Tensor x = step_input(inputs, t);
    for (std::size_t l = 0; l < layers; ++l) {
      const auto pre = project(stack.layers[l], x, h[l], b_ih[l], b_hh[l]);
      const Tensor gates = add(pre.input, pre.recurrent);
      const Tensor i = sigmoid(slice(gates, 1, 0, hidden));
      const Tensor f = sigmoid(slice(gates, 1, hidden, hidden));
      const Tensor g = tanh(slice(gates, 1, 2 * hidden, hidden));
      const Tensor o = sigmoid(slice(gates, 1, 3 * hidden, hidden));
      c[l] = add(mul(f, c[l]), mul(i, g));
      h[l] = mul(o, tanh(c[l]));
      x = h[l];
    }
    outputs.push_back(x);
  }
  return {tsgan::stack(outputs, 1), tsgan::stack(h, 0)};
}

}  // namespace tsgan
