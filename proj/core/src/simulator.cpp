#include "hsd/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "hsd/errors.hpp"

namespace hsd {

namespace {

void accumulate_gain(LevelSimStats& ls, long long drafted, long long accepted) {
  ++ls.rounds;
  ls.drafted_tokens += drafted;
  ls.accepted_tokens += accepted;
  const size_t gain = static_cast<size_t>(accepted) + 1;
  if (ls.gain_histogram.size() < gain) ls.gain_histogram.resize(gain, 0);
  ++ls.gain_histogram[gain - 1];
}

// Abstract coin-toss counterpart of the generation engine: only counts and
// costs, no tokens. Each verify round scans a batch with a biased coin and
// gains accepted + 1 tokens.
class CoinRun {
 public:
  CoinRun(const Problem& problem, const HierarchyPlan& plan, bool forward_overshoot,
          RandomSource rng)
      : problem_(problem), plan_(plan), forward_overshoot_(forward_overshoot), rng_(rng) {
    levels_.resize(plan.sigma.size());
  }

  double run(long long n_tokens) {
    const int top = plan_.levels() - 1;
    long long emitted = 0;
    while (emitted < n_tokens) emitted += run_level(top);
    emitted_ = emitted;
    return cost_ / static_cast<double>(emitted);
  }

  const std::vector<LevelSimStats>& levels() const { return levels_; }
  long long emitted() const { return emitted_; }

 private:
  double model_cost(int level) const {
    return problem_.models[static_cast<size_t>(plan_.sigma[static_cast<size_t>(level)])].cost;
  }

  long long accepted_from(long long batch, double alpha) {
    long long n = 0;
    while (n < batch && rng_.uniform01() <= alpha) ++n;
    return n;
  }

  long long run_level(int idx) {
    if (idx == 0) {
      const long long quota = plan_.t_params[0];
      cost_ += static_cast<double>(quota) * model_cost(0);
      ++levels_[0].rounds;
      return quota;
    }
    const double alpha = problem_.alpha.at(plan_.sigma[static_cast<size_t>(idx - 1)],
                                           plan_.sigma[static_cast<size_t>(idx)]);
    if (idx == plan_.levels() - 1) {
      const long long batch = run_level(idx - 1);
      cost_ += model_cost(idx);
      const long long accepted = accepted_from(batch, alpha);
      accumulate_gain(levels_[static_cast<size_t>(idx)], batch, accepted);
      return accepted + 1;
    }
    const long long quota = plan_.t_params[static_cast<size_t>(idx)];
    long long count = 0;
    while (count < quota) {
      const long long batch = run_level(idx - 1);
      cost_ += model_cost(idx);
      const long long accepted = accepted_from(batch, alpha);
      accumulate_gain(levels_[static_cast<size_t>(idx)], batch, accepted);
      count += accepted + 1;
    }
    return forward_overshoot_ ? count : quota;
  }

  const Problem& problem_;
  const HierarchyPlan& plan_;
  bool forward_overshoot_;
  RandomSource rng_;
  double cost_ = 0.0;
  long long emitted_ = 0;
  std::vector<LevelSimStats> levels_;
};

void merge_levels(std::vector<LevelSimStats>& into, const std::vector<LevelSimStats>& from) {
  if (into.size() < from.size()) into.resize(from.size());
  for (size_t i = 0; i < from.size(); ++i) {
    into[i].rounds += from[i].rounds;
    into[i].drafted_tokens += from[i].drafted_tokens;
    into[i].accepted_tokens += from[i].accepted_tokens;
    if (into[i].gain_histogram.size() < from[i].gain_histogram.size()) {
      into[i].gain_histogram.resize(from[i].gain_histogram.size(), 0);
    }
    for (size_t g = 0; g < from[i].gain_histogram.size(); ++g) {
      into[i].gain_histogram[g] += from[i].gain_histogram[g];
    }
  }
}

void finalize_report(SimReport& report) {
  const int n = report.trials;
  double sum = 0.0;
  for (double v : report.trial_latencies) sum += v;
  report.mean_latency = sum / static_cast<double>(n);
  if (n >= 2) {
    double ss = 0.0;
    for (double v : report.trial_latencies) {
      ss += (v - report.mean_latency) * (v - report.mean_latency);
    }
    report.std_error = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
  }
}

void check_sim_config(const SimConfig& config) {
  if (config.n_tokens < 1) throw input_error("simulate: n_tokens must be >= 1");
  if (config.trials < 1) throw input_error("simulate: trials must be >= 1");
}

}  // namespace

SimReport simulate(const Problem& problem, const HierarchyPlan& plan, const SimConfig& config) {
  check_sim_config(config);
  if (config.acceptance != AcceptanceMode::IidCoin) {
    throw input_error("simulate: model-based acceptance needs model instances");
  }
  if (config.cost != CostMode::Configured) {
    throw input_error("simulate: wall-clock cost needs model instances");
  }
  problem.validate();
  plan.validate(static_cast<int>(problem.models.size()), problem.t_max);

  SimReport report;
  report.trials = config.trials;
  for (int t = 0; t < config.trials; ++t) {
    CoinRun run(problem, plan, config.forward_overshoot,
                RandomSource::stream(config.seed, static_cast<uint64_t>(t)));
    report.trial_latencies.push_back(run.run(config.n_tokens));
    report.total_tokens += run.emitted();
    merge_levels(report.levels, run.levels());
  }
  finalize_report(report);
  report.speedup = problem.target_cost() / report.mean_latency;
  return report;
}

SimReport simulate(const Problem& problem, std::span<const LanguageModel* const> models,
                   const HierarchyPlan& plan, const SimConfig& config) {
  check_sim_config(config);
  problem.validate();
  plan.validate(static_cast<int>(problem.models.size()), problem.t_max);
  if (models.size() != problem.models.size()) {
    throw input_error("simulate: need one model instance per problem model");
  }

  std::vector<const LanguageModel*> plan_models;
  for (int idx : plan.sigma) plan_models.push_back(models[static_cast<size_t>(idx)]);

  EngineOptions options;
  options.rule = config.acceptance == AcceptanceMode::IidCoin ? AcceptanceRule::IidCoin
                                                              : AcceptanceRule::RejectionSampling;
  options.coin_alpha = &problem.alpha;

  SimReport report;
  report.trials = config.trials;
  double baseline_wall_per_token = 0.0;
  if (config.cost == CostMode::MeasuredWallclock) {
    RandomSource rng = RandomSource::stream(config.seed, 0x6261736564ull);
    const std::vector<int> ctx{0};
    // per-token wall cost of the target is a constant; a capped sample is enough
    const long long baseline_tokens = std::min<long long>(config.n_tokens, 512);
    GenerationResult base = autoregressive_generate(*models.back(), ctx, baseline_tokens, rng);
    baseline_wall_per_token =
        base.stats.wall_seconds / static_cast<double>(base.stats.emitted_tokens);
  }

  for (int t = 0; t < config.trials; ++t) {
    RandomSource rng = RandomSource::stream(config.seed, static_cast<uint64_t>(t));
    const std::vector<int> ctx{0};
    GenerationResult gen =
        hsd_generate(plan_models, plan, ctx, config.n_tokens, rng, options);
    const double denom = static_cast<double>(gen.stats.emitted_tokens);
    const double latency = config.cost == CostMode::Configured
                               ? gen.stats.nominal_cost / denom
                               : gen.stats.wall_seconds / denom;
    report.trial_latencies.push_back(latency);
    report.total_tokens += gen.stats.emitted_tokens;

    std::vector<LevelSimStats> levels(gen.stats.levels.size());
    for (size_t i = 0; i < gen.stats.levels.size(); ++i) {
      levels[i].rounds = i == 0 ? gen.stats.levels[i].model_calls
                                : gen.stats.levels[i].verify_rounds;
      levels[i].drafted_tokens = gen.stats.levels[i].drafted_tokens;
      levels[i].accepted_tokens = gen.stats.levels[i].accepted_tokens;
      levels[i].gain_histogram = gen.stats.levels[i].gain_histogram;
    }
    merge_levels(report.levels, levels);
  }
  finalize_report(report);
  report.speedup = config.cost == CostMode::Configured
                       ? problem.target_cost() / report.mean_latency
                       : baseline_wall_per_token / report.mean_latency;
  return report;
}

const char* ModeComparison::cell_name(int index) {
  switch (index) {
    case 0: return "model-based / configured-cost";
    case 1: return "model-based / wall-clock";
    case 2: return "iid-coin / configured-cost";
    case 3: return "iid-coin / wall-clock";
    default: return "?";
  }
}

ModeComparison compare_modes(const Problem& problem,
                             std::span<const LanguageModel* const> models,
                             const HierarchyPlan& plan, const SimConfig& config) {
  ModeComparison cmp;
  const AcceptanceMode acceptance[4] = {AcceptanceMode::ModelBased, AcceptanceMode::ModelBased,
                                        AcceptanceMode::IidCoin, AcceptanceMode::IidCoin};
  const CostMode cost[4] = {CostMode::Configured, CostMode::MeasuredWallclock,
                            CostMode::Configured, CostMode::MeasuredWallclock};
  for (int c = 0; c < 4; ++c) {
    SimConfig cell = config;
    cell.acceptance = acceptance[c];
    cell.cost = cost[c];
    cmp.cells[static_cast<size_t>(c)] = simulate(problem, models, plan, cell);
  }
  double lo = cmp.cells[0].speedup, hi = cmp.cells[0].speedup;
  for (const auto& cell : cmp.cells) {
    lo = std::min(lo, cell.speedup);
    hi = std::max(hi, cell.speedup);
  }
  cmp.max_relative_spread = (hi - lo) / lo;
  return cmp;
}

}  // namespace hsd
