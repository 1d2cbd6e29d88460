#include "hsd/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hsd/errors.hpp"

namespace hsd {

namespace {
constexpr double kResidualFloor = 1e-15;
}

void DraftBatch::validate() const {
  if (tokens.empty()) throw input_error("draft batch: empty");
  if (tokens.size() != probs.size()) {
    throw input_error("draft batch: tokens and probs lengths differ");
  }
  for (size_t i = 0; i < tokens.size(); ++i) {
    const auto& q = probs[i];
    if (tokens[i] < 0 || tokens[i] >= q.size()) {
      throw input_error("draft batch: token id out of vocabulary at position " +
                        std::to_string(i));
    }
    if (!(q[tokens[i]] > 0.0)) {
      throw input_error("draft batch: drafted token has zero draft probability at position " +
                        std::to_string(i));
    }
  }
}

Categorical residual_distribution(const Categorical& p, const Categorical& q) {
  if (p.size() != q.size()) throw input_error("residual: dimension mismatch");
  std::vector<double> res(static_cast<size_t>(p.size()), 0.0);
  double norm = 0.0;
  for (int x = 0; x < p.size(); ++x) {
    const double d = p[x] - q[x];
    if (d > 0.0) {
      res[static_cast<size_t>(x)] = d;
      norm += d;
    }
  }
  if (norm < kResidualFloor) {
    throw degenerate_residual_error("residual: p equals q, normalizer is zero");
  }
  for (double& r : res) r /= norm;
  return Categorical(std::move(res));
}

VerifyOutcome verify(const DraftBatch& batch, std::span<const Categorical> verifier_probs,
                     RandomSource& rng) {
  batch.validate();
  const int t = batch.size();
  if (static_cast<int>(verifier_probs.size()) != t + 1) {
    throw input_error("verify: need t+1 verifier distributions, got " +
                      std::to_string(verifier_probs.size()));
  }
  for (const auto& p : verifier_probs) {
    if (p.size() != batch.probs[0].size()) throw input_error("verify: vocabulary mismatch");
  }

  int n = t;
  for (int i = 0; i < t; ++i) {
    const int x = batch.tokens[static_cast<size_t>(i)];
    const double ratio = verifier_probs[static_cast<size_t>(i)][x] /
                         batch.probs[static_cast<size_t>(i)][x];
    if (rng.uniform01() > std::min(1.0, ratio)) {
      n = i;
      break;
    }
  }

  VerifyOutcome out;
  out.accepted_count = n;
  out.rejected = n < t;
  out.output_tokens.assign(batch.tokens.begin(), batch.tokens.begin() + n);

  const Categorical& p_next = verifier_probs[static_cast<size_t>(n)];
  int extra;
  if (out.rejected) {
    extra = rng.categorical(
        residual_distribution(p_next, batch.probs[static_cast<size_t>(n)]).span());
  } else {
    extra = rng.categorical(p_next.span());
  }
  out.output_tokens.push_back(extra);
  out.output_probs.assign(verifier_probs.begin(), verifier_probs.begin() + n + 1);
  return out;
}

Categorical exact_output_distribution(const Categorical& p, const Categorical& q) {
  if (p.size() != q.size()) throw input_error("exact_output_distribution: dimension mismatch");
  std::vector<double> out(static_cast<size_t>(p.size()), 0.0);
  double reject_mass = 0.0;
  for (int x = 0; x < p.size(); ++x) {
    if (q[x] <= 0.0) continue;
    const double accept = std::min(1.0, p[x] / q[x]);
    out[static_cast<size_t>(x)] += q[x] * accept;
    reject_mass += q[x] * (1.0 - accept);
  }
  if (reject_mass >= kResidualFloor) {
    const Categorical residual = residual_distribution(p, q);
    for (int x = 0; x < p.size(); ++x) {
      out[static_cast<size_t>(x)] += reject_mass * residual[x];
    }
  }
  return Categorical(std::move(out));
}

}  // namespace hsd
