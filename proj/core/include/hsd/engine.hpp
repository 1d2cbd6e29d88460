#pragma once

#include <span>
#include <vector>

#include "hsd/model.hpp"
#include "hsd/problem.hpp"
#include "hsd/rng.hpp"

namespace hsd {

// Per-level call/token counters. Level 0 only generates; intermediate levels
// verify batches from below and pass their buffers up; the target (last
// level) only verifies.
struct LevelStats {
  long long model_calls = 0;       // forward passes charged to this level's model
  long long generated_tokens = 0;  // base level autoregressive tokens
  long long verify_rounds = 0;
  long long drafted_tokens = 0;    // tokens this level received for verification
  long long accepted_tokens = 0;
  std::vector<long long> gain_histogram;  // [g-1] = rounds that yielded g tokens
};

struct SessionStats {
  std::vector<LevelStats> levels;
  double nominal_cost = 0.0;  // sum of cost(model) over all forward passes
  double wall_seconds = 0.0;  // measured host time inside model calls
  long long emitted_tokens = 0;
  long long top_rounds = 0;
};

// Acceptance rule used during verification. IidCoin replaces the
// min(1, p/q) test with a biased coin per token (probability taken from
// coin_alpha at the level pair); the corrected/bonus token is then drawn
// from the verifier's own distribution. Latency ablation only: IidCoin does
// not preserve the output law.
enum class AcceptanceRule { RejectionSampling, IidCoin };

struct EngineOptions {
  AcceptanceRule rule = AcceptanceRule::RejectionSampling;
  const AcceptanceMatrix* coin_alpha = nullptr;  // indexed by plan.sigma ids; required for IidCoin
};

struct GenerationResult {
  std::vector<int> tokens;
  SessionStats stats;
};

// Hierarchical generation: the base model drafts autoregressively, every
// intermediate level verifies batches from below and accumulates at least
// T_n verified tokens before returning (the full buffer is forwarded, even
// past T_n), and the target verifies once per outer round. Runs outer
// rounds until at least min_tokens tokens are emitted; their joint law is
// the target's autoregressive law.
//
// models holds one model per plan level, ordered as plan.sigma.
GenerationResult hsd_generate(std::span<const LanguageModel* const> models,
                              const HierarchyPlan& plan, std::span<const int> context,
                              long long min_tokens, RandomSource& rng,
                              const EngineOptions& options = {});

// Standard two-level speculative decoding: hsd_generate with sigma = (0, 1).
GenerationResult single_draft_generate(const LanguageModel& draft, const LanguageModel& target,
                                       int t, std::span<const int> context, long long min_tokens,
                                       RandomSource& rng, const EngineOptions& options = {});

// Plain autoregressive sampling from the target; one forward pass per token.
GenerationResult autoregressive_generate(const LanguageModel& target,
                                         std::span<const int> context, long long n_tokens,
                                         RandomSource& rng);

}  // namespace hsd
