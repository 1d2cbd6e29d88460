#include "hsd/engine.hpp"

#include <algorithm>
#include <chrono>
#include <string>

#include "hsd/errors.hpp"
#include "hsd/sampling.hpp"

namespace hsd {

namespace {

using Clock = std::chrono::steady_clock;

class Session {
 public:
  Session(std::span<const LanguageModel* const> models, const HierarchyPlan& plan,
          std::span<const int> context, RandomSource& rng, const EngineOptions& options)
      : models_(models), plan_(plan), rng_(rng), options_(options) {
    ctx_.assign(context.begin(), context.end());
    stats_.levels.resize(models.size());
  }

  GenerationResult run(long long min_tokens) {
    GenerationResult result;
    const int top = plan_.levels() - 1;
    while (stats_.emitted_tokens < min_tokens) {
      LevelOutput out = run_level(top);
      stats_.emitted_tokens += out.tokens.size();
      ++stats_.top_rounds;
      for (int tok : out.tokens) ctx_.push_back(tok);
      result.tokens.insert(result.tokens.end(), out.tokens.begin(), out.tokens.end());
    }
    result.stats = std::move(stats_);
    return result;
  }

 private:
  struct LevelOutput {
    std::vector<int> tokens;
    std::vector<Categorical> probs;
  };

  Categorical timed_next(int level) {
    const auto t0 = Clock::now();
    Categorical dist = models_[static_cast<size_t>(level)]->next_distribution(ctx_);
    stats_.wall_seconds += std::chrono::duration<double>(Clock::now() - t0).count();
    stats_.nominal_cost += models_[static_cast<size_t>(level)]->cost();
    ++stats_.levels[static_cast<size_t>(level)].model_calls;
    return dist;
  }

  std::vector<Categorical> timed_prefixes(int level, std::span<const int> continuation) {
    const auto t0 = Clock::now();
    std::vector<Categorical> dists =
        models_[static_cast<size_t>(level)]->prefix_distributions(ctx_, continuation);
    stats_.wall_seconds += std::chrono::duration<double>(Clock::now() - t0).count();
    stats_.nominal_cost += models_[static_cast<size_t>(level)]->cost();
    ++stats_.levels[static_cast<size_t>(level)].model_calls;
    return dists;
  }

  // One parallel verification pass at `level` over a draft batch produced by
  // the level below. ctx_ currently holds this level's context.
  LevelOutput verify_at(int level, LevelOutput draft) {
    std::vector<Categorical> p = timed_prefixes(level, draft.tokens);
    const int t = static_cast<int>(draft.tokens.size());

    VerifyOutcome outcome;
    if (options_.rule == AcceptanceRule::RejectionSampling) {
      DraftBatch batch{std::move(draft.tokens), std::move(draft.probs)};
      outcome = verify(batch, p, rng_);
    } else {
      const double a = options_.coin_alpha->at(plan_.sigma[static_cast<size_t>(level - 1)],
                                               plan_.sigma[static_cast<size_t>(level)]);
      int n = t;
      for (int i = 0; i < t; ++i) {
        if (rng_.uniform01() > a) {
          n = i;
          break;
        }
      }
      outcome.accepted_count = n;
      outcome.rejected = n < t;
      outcome.output_tokens.assign(draft.tokens.begin(), draft.tokens.begin() + n);
      outcome.output_tokens.push_back(rng_.categorical(p[static_cast<size_t>(n)].span()));
      outcome.output_probs.assign(p.begin(), p.begin() + n + 1);
    }

    LevelStats& ls = stats_.levels[static_cast<size_t>(level)];
    ++ls.verify_rounds;
    ls.drafted_tokens += t;
    ls.accepted_tokens += outcome.accepted_count;
    const size_t gain = outcome.output_tokens.size();
    if (ls.gain_histogram.size() < gain) ls.gain_histogram.resize(gain, 0);
    ++ls.gain_histogram[gain - 1];

    return {std::move(outcome.output_tokens), std::move(outcome.output_probs)};
  }

  LevelOutput run_level(int idx) {
    LevelOutput out;
    const size_t ctx_mark = ctx_.size();
    const int top = plan_.levels() - 1;

    if (idx == 0) {
      const int quota = plan_.t_params[0];
      for (int count = 0; count < quota; ++count) {
        Categorical dist = timed_next(0);
        const int tok = rng_.categorical(dist.span());
        ctx_.push_back(tok);
        out.tokens.push_back(tok);
        out.probs.push_back(std::move(dist));
        ++stats_.levels[0].generated_tokens;
      }
    } else if (idx == top) {
      LevelOutput draft = run_level(idx - 1);
      out = verify_at(idx, std::move(draft));
    } else {
      const int quota = plan_.t_params[static_cast<size_t>(idx)];
      int count = 0;
      while (count < quota) {
        LevelOutput draft = run_level(idx - 1);
        LevelOutput verified = verify_at(idx, std::move(draft));
        count += static_cast<int>(verified.tokens.size());
        for (int tok : verified.tokens) ctx_.push_back(tok);
        std::move(verified.tokens.begin(), verified.tokens.end(), std::back_inserter(out.tokens));
        std::move(verified.probs.begin(), verified.probs.end(), std::back_inserter(out.probs));
      }
    }

    ctx_.resize(ctx_mark);  // the caller appends what it verifies
    return out;
  }

  std::span<const LanguageModel* const> models_;
  const HierarchyPlan& plan_;
  RandomSource& rng_;
  const EngineOptions& options_;
  std::vector<int> ctx_;
  SessionStats stats_;
};

void check_engine_inputs(std::span<const LanguageModel* const> models, const HierarchyPlan& plan,
                         long long min_tokens, const EngineOptions& options) {
  if (models.size() != plan.sigma.size()) {
    throw input_error("hsd_generate: need one model per plan level");
  }
  int t_cap = 1;
  for (int t : plan.t_params) t_cap = std::max(t_cap, t);
  plan.validate(plan.sigma.back() + 1, t_cap);
  if (min_tokens < 1) throw input_error("hsd_generate: min_tokens must be >= 1");
  const int vocab = models.front()->vocab_size();
  for (const auto* m : models) {
    if (m->vocab_size() != vocab) throw input_error("hsd_generate: vocabulary mismatch");
  }
  if (options.rule == AcceptanceRule::IidCoin && options.coin_alpha == nullptr) {
    throw input_error("hsd_generate: IidCoin acceptance needs a coin_alpha matrix");
  }
}

}  // namespace

GenerationResult hsd_generate(std::span<const LanguageModel* const> models,
                              const HierarchyPlan& plan, std::span<const int> context,
                              long long min_tokens, RandomSource& rng,
                              const EngineOptions& options) {
  check_engine_inputs(models, plan, min_tokens, options);
  Session session(models, plan, context, rng, options);
  return session.run(min_tokens);
}

GenerationResult single_draft_generate(const LanguageModel& draft, const LanguageModel& target,
                                       int t, std::span<const int> context, long long min_tokens,
                                       RandomSource& rng, const EngineOptions& options) {
  const LanguageModel* models[2] = {&draft, &target};
  HierarchyPlan plan{{0, 1}, {t}};
  return hsd_generate(models, plan, context, min_tokens, rng, options);
}

GenerationResult autoregressive_generate(const LanguageModel& target,
                                         std::span<const int> context, long long n_tokens,
                                         RandomSource& rng) {
  if (n_tokens < 1) throw input_error("autoregressive_generate: n_tokens must be >= 1");
  GenerationResult result;
  result.stats.levels.resize(1);
  std::vector<int> ctx(context.begin(), context.end());
  for (long long i = 0; i < n_tokens; ++i) {
    const auto t0 = Clock::now();
    Categorical dist = target.next_distribution(ctx);
    result.stats.wall_seconds += std::chrono::duration<double>(Clock::now() - t0).count();
    result.stats.nominal_cost += target.cost();
    ++result.stats.levels[0].model_calls;
    const int tok = rng.categorical(dist.span());
    ctx.push_back(tok);
    result.tokens.push_back(tok);
  }
  result.stats.emitted_tokens = n_tokens;
  result.stats.top_rounds = n_tokens;
  return result;
}

}  // namespace hsd
