// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#include "tsgan/tune.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>

#include "tsgan/config.hpp"
#include "tsgan/errors.hpp"

namespace tsgan {
namespace {

constexpr std::size_t kReduction = 3;

std::size_t keep_count(std::size_t n) { return (n + kReduction - 1) / kReduction; }

double rank_key(double score) { return std::isfinite(score) ? score : std::numeric_limits<double>::infinity(); }

}  // namespace

std::size_t HalvingPlan::final_survivors() const { return entrants.empty() ? 0 : keep_count(entrants.back()); }

HalvingPlan plan_successive_halving(std::size_t trials, std::size_t rungs, std::size_t budget) {
  if (trials == 0) throw ConfigError("tune: at least one trial is required");
  if (rungs == 0) throw ConfigError("tune: at least one rung is required");
  HalvingPlan plan;
  plan.trials = trials;
  plan.rungs = rungs;
  // Cost of base_steps = 1: rung r adds 3^r - 3^(r-1) steps to each entrant.
  std::size_t unit_cost = 0;
  std::size_t n = trials;
  std::size_t scale = 1;
  std::size_t previous = 0;
  for (std::size_t r = 0; r < rungs; ++r) {
    plan.entrants.push_back(n);
    unit_cost += n * (scale - previous);
    previous = scale;
    scale *= kReduction;
    n = keep_count(n);
  }
  plan.base_steps = budget / unit_cost;
  if (plan.base_steps == 0) {
    throw ConfigError("tune: budget of " + std::to_string(budget) + " generator steps is below the " +
                      std::to_string(unit_cost) + " needed for one step per trial and rung");
  }
  scale = 1;
  for (std::size_t r = 0; r < rungs; ++r) {
    plan.steps.push_back(plan.base_steps * scale);
    scale *= kReduction;
  }
  plan.total_steps = plan.base_steps * unit_cost;
  return plan;
}

TuneReport successive_halving(const HalvingPlan& plan, const TrialEvaluator& evaluate,
                              const std::vector<GanTrainConfig>& configs, const PrunedHook& on_pruned) {
  if (!configs.empty() && configs.size() != plan.trials) throw ContractError("tune: one config per trial expected");
  TuneReport report;
  report.plan = plan;
  std::vector<TrialOutcome> outcomes(plan.trials);
  for (std::size_t i = 0; i < plan.trials; ++i) {
    outcomes[i].index = i;
    if (!configs.empty()) outcomes[i].config = configs[i];
  }

  std::vector<std::size_t> alive(plan.trials);
  for (std::size_t i = 0; i < plan.trials; ++i) alive[i] = i;
  for (std::size_t r = 0; r < plan.rungs; ++r) {
    RungResult rung;
    rung.steps = plan.steps[r];
    rung.entrants = alive;
    for (const std::size_t i : alive) {
      const double score = evaluate(i, rung.steps);
      rung.scores.push_back(score);
      outcomes[i].score = score;
      outcomes[i].steps_survived = rung.steps;
    }
    std::vector<std::size_t> order(alive.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return rank_key(rung.scores[a]) < rank_key(rung.scores[b]);
    });
    order.resize(keep_count(order.size()));
    for (const std::size_t k : order) {
      rung.survivors.push_back(rung.entrants[k]);
      ++outcomes[rung.entrants[k]].rungs_survived;
    }
    if (on_pruned) {
      for (const std::size_t i : rung.entrants) {
        if (std::find(rung.survivors.begin(), rung.survivors.end(), i) == rung.survivors.end()) on_pruned(i);
      }
    }
    alive = rung.survivors;
    std::sort(alive.begin(), alive.end());
    report.rungs.push_back(std::move(rung));
  }

  report.ranking = outcomes;
  std::stable_sort(report.ranking.begin(), report.ranking.end(), [](const TrialOutcome& a, const TrialOutcome& b) {
    if (a.rungs_survived != b.rungs_survived) return a.rungs_survived > b.rungs_survived;
    if (rank_key(a.score) != rank_key(b.score)) return rank_key(a.score) < rank_key(b.score);
    return a.index < b.index;
  });
  return report;
}

void TuneReport::write_table(std::ostream& out) const {
  out << "rank,trial,jsd,steps,rungs_survived,generator_layers,generator_hidden,critic_layers,critic_hidden,seed\n";
  for (std::size_t k = 0; k < ranking.size(); ++k) {
    const auto& t = ranking[k];
    out << k + 1 << ',' << t.index << ',' << format_real(t.score) << ',' << t.steps_survived << ','
        << t.rungs_survived << ',' << t.config.generator_layers << ',' << t.config.generator_hidden << ','
        << t.config.critic_layers << ',' << t.config.critic_hidden << ',' << t.config.seed << '\n';
  }
}

std::vector<GanTrainConfig> sample_search_space(const GanTrainConfig& base, std::size_t trials,
                                                const SearchSpace& space) {
  if (space.max_layers < 1 || space.max_layers > 4 || space.max_hidden < 32 || space.max_hidden > 512) {
    throw ConfigError("tune: search space must lie within layers [1, 4] and hidden [32, 512]");
  }
  std::vector<GanTrainConfig> out;
  for (std::size_t i = 0; i < trials; ++i) {
    GanTrainConfig c = base;
    c.seed = derive_seed(base.seed, i);
    Rng rng(c.seed);
    std::uniform_int_distribution<std::size_t> layers(1, space.max_layers);
    std::uniform_int_distribution<std::size_t> hidden(32, space.max_hidden);
    c.generator_layers = layers(rng);
    c.generator_hidden = hidden(rng);
    c.critic_layers = layers(rng);
    c.critic_hidden = hidden(rng);
    out.push_back(c);
  }
  return out;
}

TuneReport tune_gan(const std::vector<GanTrainConfig>& trials, const WindowBatch& data, std::size_t rungs,
                    std::size_t budget) {
  const HalvingPlan plan = plan_successive_halving(trials.size(), rungs, budget);
  std::vector<std::unique_ptr<GanTrainer>> trainers(trials.size());
  const auto evaluate = [&](std::size_t i, std::size_t steps) {
    if (!trainers[i]) {
      GanTrainConfig c = trials[i];
      c.eval_every = 0;
      c.checkpoint_every = 0;
      trainers[i] = std::make_unique<GanTrainer>(c, data);
    }
    GanTrainer& t = *trainers[i];
    try {
      t.train(steps - t.model().generator_steps);
      return t.evaluate_now();
    } catch (const TrainingError&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  // Pruned trials never train again; drop their parameters and optimizer state.
  return successive_halving(plan, evaluate, trials, [&](std::size_t i) { trainers[i].reset(); });
}

}  // namespace tsgan
