#pragma once

#include <unordered_map>
#include <vector>

#include "hsd/problem.hpp"
#include "hsd/rng.hpp"

namespace hsd {

// Law of the number of tokens a verifier gains from one batch of t_i drafts
// under per-token IID acceptance alpha: a truncated geometric,
//   P(n) = alpha^(n-1) (1 - alpha)  for 1 <= n <= t_i,   P(t_i + 1) = alpha^t_i.
// Entry [n-1] of the result holds P(n).
std::vector<double> round_token_distribution(double alpha, int t_i);

// E[tokens per round] = (1 - alpha^(t_i+1)) / (1 - alpha), with the alpha->1
// limit t_i + 1.
double expected_round_tokens(double alpha, int t_i);

// Expected number of draft/verify rounds until the cumulative gained tokens
// reach t_j, when each round delivers round_token_distribution(alpha, t_i)
// tokens. Exact renewal recursion g(r) = 1 + sum_n P(n) g(r-n), g(r<=0) = 0.
double gamma_rounds(double alpha, int t_i, int t_j);

// Per-token round rate of the top level, which verifies batches of T drafts:
// (1 - alpha) / (1 - alpha^(T+1)), with the alpha->1 limit 1/(T+1).
double top_rate(double alpha, int t);

// Monte-Carlo estimate of gamma_rounds; cross-check for the exact recursion.
struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long long trials = 0;
};
MonteCarloEstimate mc_gamma_rounds(double alpha, int t_i, int t_j, long long trials,
                                   RandomSource& rng);

// Memo for gamma_rounds keyed by (alpha at full input precision, t_i, t_j).
// Populate single-threaded (e.g. during graph construction); concurrent
// reads of a warm table are safe.
class GammaTable {
 public:
  double get(double alpha, int t_i, int t_j);
  size_t size() const { return memo_.size(); }

 private:
  struct Key {
    uint64_t alpha_bits;
    int t_i, t_j;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    size_t operator()(const Key& k) const;
  };
  std::unordered_map<Key, double, KeyHash> memo_;
};

// Analytical per-token latency of a hierarchy (the product-form recursion):
//   L(sigma, T) = sum_i c_sigma[i] * prod_{j>=i} R_j
// with R_0 = T_0, R_n = gamma_rounds(alpha_{sigma[n-1],sigma[n]}, T_{n-1}, T_n)
// for intermediate levels and R_top = top_rate(alpha, T_{last}).
struct LatencyReport {
  HierarchyPlan plan;
  double latency_per_token = 0.0;
  double speedup = 0.0;                // target-only cost / latency
  std::vector<double> level_factors;   // R_0 .. R_{|sigma|-1}
};

LatencyReport expected_latency(const Problem& problem, const HierarchyPlan& plan);

namespace detail {
// Formula evaluation without plan validation (in particular without the
// nondecreasing-T constraint); sigma and t_params must be structurally
// consistent with the problem. Fills *factors with R_0..R_{|sigma|-1} when
// given.
double latency_formula(const Problem& problem, const std::vector<int>& sigma,
                       const std::vector<int>& t_params, std::vector<double>* factors = nullptr);
}  // namespace detail

}  // namespace hsd
