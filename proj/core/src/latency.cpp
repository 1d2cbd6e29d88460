#include "hsd/latency.hpp"

#include <cmath>
#include <cstring>

#include "hsd/errors.hpp"

namespace hsd {

namespace {
constexpr double kAlphaOneThreshold = 1.0 - 1e-12;
}

std::vector<double> round_token_distribution(double alpha, int t_i) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw input_error("alpha must be in [0, 1]");
  if (t_i < 1) throw input_error("t_i must be >= 1");
  std::vector<double> p(static_cast<size_t>(t_i) + 1, 0.0);
  double pow_a = 1.0;  // alpha^(n-1)
  for (int n = 1; n <= t_i; ++n) {
    p[static_cast<size_t>(n - 1)] = pow_a * (1.0 - alpha);
    pow_a *= alpha;
  }
  p[static_cast<size_t>(t_i)] = pow_a;  // all t_i accepted + bonus
  return p;
}

double expected_round_tokens(double alpha, int t_i) {
  if (alpha >= kAlphaOneThreshold) return static_cast<double>(t_i) + 1.0;
  return (1.0 - std::pow(alpha, t_i + 1)) / (1.0 - alpha);
}

double gamma_rounds(double alpha, int t_i, int t_j) {
  if (t_j < 1) throw input_error("t_j must be >= 1");
  const std::vector<double> p = round_token_distribution(alpha, t_i);
  // g[r] = expected rounds to accumulate r more tokens
  std::vector<double> g(static_cast<size_t>(t_j) + 1, 0.0);
  for (int r = 1; r <= t_j; ++r) {
    double acc = 1.0;
    const int n_max = std::min(t_i + 1, r - 1);
    for (int n = 1; n <= n_max; ++n) {
      acc += p[static_cast<size_t>(n - 1)] * g[static_cast<size_t>(r - n)];
    }
    g[static_cast<size_t>(r)] = acc;
  }
  return g[static_cast<size_t>(t_j)];
}

double top_rate(double alpha, int t) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw input_error("alpha must be in [0, 1]");
  if (t < 1) throw input_error("t must be >= 1");
  if (alpha >= kAlphaOneThreshold) return 1.0 / (static_cast<double>(t) + 1.0);
  return (1.0 - alpha) / (1.0 - std::pow(alpha, t + 1));
}

MonteCarloEstimate mc_gamma_rounds(double alpha, int t_i, int t_j, long long trials,
                                   RandomSource& rng) {
  const std::vector<double> p = round_token_distribution(alpha, t_i);
  std::vector<double> cdf(p.size());
  double cum = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    cum += p[i];
    cdf[i] = cum;
  }
  double sum = 0.0, sum_sq = 0.0;
  for (long long t = 0; t < trials; ++t) {
    int collected = 0;
    long long rounds = 0;
    while (collected < t_j) {
      const double u = rng.uniform01();
      int gained = static_cast<int>(cdf.size());
      for (size_t i = 0; i < cdf.size(); ++i) {
        if (u < cdf[i]) {
          gained = static_cast<int>(i) + 1;
          break;
        }
      }
      collected += gained;
      ++rounds;
    }
    const double r = static_cast<double>(rounds);
    sum += r;
    sum_sq += r * r;
  }
  MonteCarloEstimate est;
  est.trials = trials;
  est.mean = sum / static_cast<double>(trials);
  const double var =
      (sum_sq - sum * sum / static_cast<double>(trials)) / std::max(1.0, static_cast<double>(trials - 1));
  est.std_error = std::sqrt(std::max(0.0, var) / static_cast<double>(trials));
  return est;
}

size_t GammaTable::KeyHash::operator()(const Key& k) const {
  uint64_t h = k.alpha_bits;
  h ^= (static_cast<uint64_t>(static_cast<uint32_t>(k.t_i)) << 32) |
       static_cast<uint64_t>(static_cast<uint32_t>(k.t_j));
  h *= 0x9e3779b97f4a7c15ull;
  return static_cast<size_t>(h ^ (h >> 29));
}

double GammaTable::get(double alpha, int t_i, int t_j) {
  uint64_t bits;
  static_assert(sizeof(bits) == sizeof(alpha));
  std::memcpy(&bits, &alpha, sizeof(bits));
  const Key key{bits, t_i, t_j};
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  const double value = gamma_rounds(alpha, t_i, t_j);
  memo_.emplace(key, value);
  return value;
}

namespace detail {

double latency_formula(const Problem& problem, const std::vector<int>& sigma,
                       const std::vector<int>& t_params, std::vector<double>* factors_out) {
  const int s = static_cast<int>(sigma.size());
  std::vector<double> factors(static_cast<size_t>(s), 0.0);
  factors[0] = static_cast<double>(t_params[0]);
  for (int n = 1; n < s - 1; ++n) {
    const double a = problem.alpha.at(sigma[static_cast<size_t>(n - 1)],
                                      sigma[static_cast<size_t>(n)]);
    factors[static_cast<size_t>(n)] = gamma_rounds(a, t_params[static_cast<size_t>(n - 1)],
                                                   t_params[static_cast<size_t>(n)]);
  }
  const double a_top =
      problem.alpha.at(sigma[static_cast<size_t>(s - 2)], sigma[static_cast<size_t>(s - 1)]);
  factors[static_cast<size_t>(s - 1)] = top_rate(a_top, t_params.back());

  // Horner form: L = R_{s-1} (c_{s-1} + R_{s-2} (c_{s-2} + ... + R_0 c_0))
  double acc = 0.0;
  for (int n = 0; n < s; ++n) {
    const double c = problem.models[static_cast<size_t>(sigma[static_cast<size_t>(n)])].cost;
    acc = factors[static_cast<size_t>(n)] * (c + acc);
  }
  if (factors_out) *factors_out = std::move(factors);
  return acc;
}

}  // namespace detail

LatencyReport expected_latency(const Problem& problem, const HierarchyPlan& plan) {
  problem.validate();
  plan.validate(static_cast<int>(problem.models.size()), problem.t_max);

  LatencyReport report;
  report.plan = plan;
  report.latency_per_token =
      detail::latency_formula(problem, plan.sigma, plan.t_params, &report.level_factors);
  report.speedup = problem.target_cost() / report.latency_per_token;
  return report;
}

}  // namespace hsd
