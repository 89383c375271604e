// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <span>
#include <vector>

#include "tsgan/tensor.hpp"

namespace tsgan {

/// Computes input gradients of one recorded op from the gradient of its output.
/// Only entries flagged in `needed` have to be defined. Backward functions are
/// written with the ordinary tensor ops, so running them while recording makes
/// the resulting gradients differentiable again.
using BackwardFn = std::function<std::vector<Tensor>(
    const Tensor& grad_out, const std::vector<Tensor>& inputs, const Tensor& output,
    const std::vector<bool>& needed)>;

struct TapeNode {
  const char* kind = "leaf";
  std::vector<Tensor> inputs;
  // Node index of each input on the owning tape, or kDetached.
  std::vector<std::size_t> input_nodes;
  Tensor output;
  BackwardFn backward;

  static constexpr std::size_t kDetached = static_cast<std::size_t>(-1);
};

/// Records differentiable ops executed on this thread while it is alive.
///
/// Constructing a Tape makes it the active tape of the calling thread; the
/// previously active tape (if any) is restored on destruction. Nodes are
/// appended in execution order, so the node list is topologically sorted.
/// A tape and its tensors must stay on one thread.
class Tape {
 public:
  Tape();
  ~Tape();
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Makes `t` a leaf of this tape. No-op when it is already recorded here.
  void watch(const Tensor& t);
  void watch(std::span<const Tensor> tensors);

  std::uint64_t id() const noexcept { return id_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  const TapeNode& node(std::size_t index) const { return nodes_.at(index); }

  static Tape* active() noexcept;

  /// Appends a node for `output` if recording is enabled and any input is
  /// attached to the active tape. Used by op implementations.
  static void record(const char* kind, std::vector<Tensor> inputs, Tensor& output, BackwardFn fn);

 private:
  std::size_t append(TapeNode node);

  std::uint64_t id_;
  Tape* previous_;
  std::deque<TapeNode> nodes_;

  friend std::vector<Tensor> backward(const Tensor&, std::span<const Tensor>, bool);
};

/// Suspends recording on this thread for its lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool recording_enabled() noexcept;

/// Reverse-mode gradient of a scalar `loss` with respect to each tensor in `wrt`.
///
/// With create_graph the backward computation is itself recorded, so the
/// returned gradients can be differentiated again. A wrt tensor that is not
/// attached to the active tape (or does not influence the loss) gets a zero
/// tensor of its shape. Throws ContractError for a non-scalar loss.
std::vector<Tensor> backward(const Tensor& loss, std::span<const Tensor> wrt, bool create_graph = false);

Tensor grad(const Tensor& loss, const Tensor& wrt, bool create_graph = false);

}  // namespace tsgan
