// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <vector>

#include "tsgan/data.hpp"
#include "tsgan/gan.hpp"

namespace tsgan {

/// Successive halving with reduction factor 3: rung r trains every surviving
/// trial up to base_steps * 3^r cumulative generator steps, scores it, and
/// keeps the best ceil(n / 3).
struct HalvingPlan {
  std::size_t trials = 0;
  std::size_t rungs = 0;
  std::size_t base_steps = 0;
  std::vector<std::size_t> entrants;  // trials trained in each rung
  std::vector<std::size_t> steps;     // cumulative steps at the end of each rung
  std::size_t total_steps = 0;        // generator steps summed over trials and rungs

  /// Trials remaining after the last rung.
  std::size_t final_survivors() const;
};

/// Largest base_steps whose schedule fits in `budget` generator steps.
/// ConfigError when not even one step per trial in every rung fits.
HalvingPlan plan_successive_halving(std::size_t trials, std::size_t rungs, std::size_t budget);

/// Trains trial `index` up to `steps` cumulative generator steps and returns
/// its score (lower is better). Non-finite scores rank last.
using TrialEvaluator = std::function<double(std::size_t index, std::size_t steps)>;

struct RungResult {
  std::size_t steps = 0;
  std::vector<std::size_t> entrants;  // ascending trial index
  std::vector<double> scores;         // parallel to entrants
  std::vector<std::size_t> survivors;  // best first; ties by trial index
};

struct TrialOutcome {
  std::size_t index = 0;
  GanTrainConfig config;
  double score = 0.0;            // at the last rung the trial ran
  std::size_t steps_survived = 0;  // cumulative steps trained
  std::size_t rungs_survived = 0;  // rungs after which it was kept
};

struct TuneReport {
  HalvingPlan plan;
  std::vector<RungResult> rungs;
  std::vector<TrialOutcome> ranking;  // best first

  const TrialOutcome& best() const { return ranking.front(); }
  /// CSV: rank,trial,score,steps,rungs_survived,generator_layers,...
  void write_table(std::ostream& out) const;
};

using PrunedHook = std::function<void(std::size_t index)>;

/// Runs the plan. `configs` (may be empty) labels the outcomes; `on_pruned`
/// is told about every trial dropped after a rung.
TuneReport successive_halving(const HalvingPlan& plan, const TrialEvaluator& evaluate,
                              const std::vector<GanTrainConfig>& configs = {}, const PrunedHook& on_pruned = {});

struct SearchSpace {
  std::size_t max_layers = 4;    // layers drawn from [1, max_layers]
  std::size_t max_hidden = 512;  // hidden sizes drawn from [32, max_hidden]
};

/// Trial i: layer counts and hidden sizes of G and D drawn uniformly from the
/// space with Rng(seed ^ i); its training seed is seed ^ i. Everything else
/// is copied from `base`.
std::vector<GanTrainConfig> sample_search_space(const GanTrainConfig& base, std::size_t trials,
                                                const SearchSpace& space = {});

/// Successive halving over `trials`, scored by the mean JSD of each
/// generator against `data`. Periodic evaluation inside trials is disabled.
TuneReport tune_gan(const std::vector<GanTrainConfig>& trials, const WindowBatch& data, std::size_t rungs,
                    std::size_t budget);

}  // namespace tsgan
