// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#include "tsgan/autodiff.hpp"

#include <atomic>
#include <optional>

#include "tsgan/errors.hpp"
#include "tsgan/ops.hpp"

namespace tsgan {
namespace {

std::atomic<std::uint64_t> g_next_tape_id{1};
thread_local Tape* g_active_tape = nullptr;
thread_local bool g_recording = true;

}  // namespace

Tape::Tape() : id_(g_next_tape_id.fetch_add(1)), previous_(g_active_tape) { g_active_tape = this; }

Tape::~Tape() { g_active_tape = previous_; }

Tape* Tape::active() noexcept { return g_active_tape; }

bool recording_enabled() noexcept { return g_recording; }

NoGradGuard::NoGradGuard() : previous_(g_recording) { g_recording = false; }
NoGradGuard::~NoGradGuard() { g_recording = previous_; }

std::size_t Tape::append(TapeNode node) {
  nodes_.push_back(std::move(node));
  return nodes_.size() - 1;
}

void Tape::watch(const Tensor& t) {
  if (!t.defined()) throw ContractError("cannot watch an undefined tensor");
  auto& impl = *t.impl_;
  if (impl.tape_id == id_) return;
  TapeNode leaf;
  leaf.output = t;
  impl.node = append(std::move(leaf));
  impl.tape_id = id_;
}

void Tape::watch(std::span<const Tensor> tensors) {
  for (const auto& t : tensors) watch(t);
}

void Tape::record(const char* kind, std::vector<Tensor> inputs, Tensor& output, BackwardFn fn) {
  Tape* tape = g_active_tape;
  if (tape == nullptr || !g_recording) return;
  std::vector<std::size_t> input_nodes(inputs.size(), TapeNode::kDetached);
  bool any = false;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto& impl = inputs[i].impl_;
    if (impl && impl->tape_id == tape->id_) {
      input_nodes[i] = impl->node;
      any = true;
    }
  }
  if (!any) return;
  TapeNode node;
  node.kind = kind;
  node.inputs = std::move(inputs);
  node.input_nodes = std::move(input_nodes);
  node.output = output;
  node.backward = std::move(fn);
  const std::size_t index = tape->append(std::move(node));
  output.impl_->tape_id = tape->id_;
  output.impl_->node = index;
}

std::vector<Tensor> backward(const Tensor& loss, std::span<const Tensor> wrt, bool create_graph) {
  if (!loss.defined() || loss.numel() != 1) {
    throw ContractError("backward() needs a scalar loss, got shape " +
                        (loss.defined() ? shape_str(loss.shape()) : std::string("<undefined>")));
  }
  std::vector<Tensor> result(wrt.size());
  auto fill_zeros = [&] {
    for (std::size_t j = 0; j < wrt.size(); ++j) {
      if (!result[j].defined()) result[j] = Tensor::zeros(wrt[j].shape());
    }
    return result;
  };

  Tape* tape = Tape::active();
  if (tape == nullptr || !loss.attached()) return fill_zeros();

  const std::size_t root = loss.impl()->node;
  const std::size_t count = root + 1;

  // Only nodes that depend on some wrt tensor need gradients.
  std::vector<char> leads(count, 0);
  std::vector<char> keep(count, 0);
  for (const auto& t : wrt) {
    if (t.attached() && t.impl()->node < count) {
      leads[t.impl()->node] = 1;
      keep[t.impl()->node] = 1;
    }
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (leads[i]) continue;
    for (std::size_t in : tape->nodes_[i].input_nodes) {
      if (in != TapeNode::kDetached && leads[in]) {
        leads[i] = 1;
        break;
      }
    }
  }
  if (!leads[root]) return fill_zeros();

  std::optional<NoGradGuard> no_grad;
  if (!create_graph) no_grad.emplace();

  std::vector<Tensor> grads(count);
  grads[root] = Tensor::ones(loss.shape());
  for (std::size_t i = root + 1; i-- > 0;) {
    if (!grads[i].defined()) continue;
    const TapeNode& node = tape->nodes_[i];
    if (!node.backward) continue;
    std::vector<bool> needed(node.inputs.size(), false);
    bool any = false;
    for (std::size_t k = 0; k < node.inputs.size(); ++k) {
      const std::size_t in = node.input_nodes[k];
      if (in != TapeNode::kDetached && leads[in]) {
        needed[k] = true;
        any = true;
      }
    }
    if (any) {
      std::vector<Tensor> input_grads = node.backward(grads[i], node.inputs, node.output, needed);
      for (std::size_t k = 0; k < node.inputs.size(); ++k) {
        if (!needed[k] || !input_grads[k].defined()) continue;
        if (input_grads[k].shape() != node.inputs[k].shape()) {
          throw ContractError(std::string("gradient shape mismatch in op ") + node.kind);
        }
        Tensor& slot = grads[node.input_nodes[k]];
        slot = slot.defined() ? add(slot, input_grads[k]) : input_grads[k];
      }
    }
    if (!keep[i]) grads[i] = Tensor();
  }

  for (std::size_t j = 0; j < wrt.size(); ++j) {
    const auto& t = wrt[j];
    if (t.attached() && t.impl()->node < count && grads[t.impl()->node].defined()) {
      result[j] = grads[t.impl()->node];
    }
  }
  return fill_zeros();
}

Tensor grad(const Tensor& loss, const Tensor& wrt, bool create_graph) {
  return backward(loss, std::span<const Tensor>(&wrt, 1), create_graph).front();
}

}  // namespace tsgan
