#pragma once

#include <array>
#include <span>
#include <vector>

#include "hsd/engine.hpp"
#include "hsd/problem.hpp"

namespace hsd {

enum class AcceptanceMode { ModelBased, IidCoin };
enum class CostMode { Configured, MeasuredWallclock };

struct SimConfig {
  AcceptanceMode acceptance = AcceptanceMode::IidCoin;
  CostMode cost = CostMode::Configured;
  long long n_tokens = 100000;  // emitted tokens per trial (at least)
  int trials = 1;
  uint64_t seed = 0;
  // Abstract coin runs only: when false (default) every level forwards
  // exactly its quota upstream, matching the renewal model behind the
  // analytical latency; when true the full buffer is forwarded, matching
  // the generation engine's literal behavior.
  bool forward_overshoot = false;
};

struct LevelSimStats {
  long long rounds = 0;
  long long drafted_tokens = 0;
  long long accepted_tokens = 0;
  std::vector<long long> gain_histogram;  // [g-1] = rounds that yielded g tokens
};

struct SimReport {
  double mean_latency = 0.0;  // cost units (or seconds in wall-clock mode) per token
  double std_error = 0.0;     // across trials
  double speedup = 0.0;       // vs the target-only baseline in the same cost mode
  long long total_tokens = 0;
  int trials = 0;
  std::vector<LevelSimStats> levels;
  std::vector<double> trial_latencies;
};

// Abstract coin-toss run driven by the problem instance alone: per-token
// acceptance is a biased coin with the configured pairwise rate, costs are
// the configured ones, no distributions or tokens are materialized.
SimReport simulate(const Problem& problem, const HierarchyPlan& plan, const SimConfig& config);

// Engine-backed run over real models (plan.sigma indexes into `models` and
// `problem` alike). IidCoin acceptance substitutes the coin rule inside the
// engine; MeasuredWallclock reports measured seconds per token instead of
// nominal cost, with the baseline measured from an autoregressive run.
SimReport simulate(const Problem& problem, std::span<const LanguageModel* const> models,
                   const HierarchyPlan& plan, const SimConfig& config);

// The four-way ablation: {model-based, iid-coin} x {configured, wall-clock},
// all run through the engine for like-for-like dynamics.
struct ModeComparison {
  // [acceptance][cost]: 0 = ModelBased/Configured, 1 = ModelBased/Wallclock,
  // 2 = IidCoin/Configured, 3 = IidCoin/Wallclock
  std::array<SimReport, 4> cells;
  double max_relative_spread = 0.0;  // of cell speedups

  static const char* cell_name(int index);
};

ModeComparison compare_modes(const Problem& problem,
                             std::span<const LanguageModel* const> models,
                             const HierarchyPlan& plan, const SimConfig& config);

}  // namespace hsd
