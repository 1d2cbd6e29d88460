#pragma once

#include <span>
#include <vector>

#include "hsd/categorical.hpp"
#include "hsd/rng.hpp"

namespace hsd {

// Draft tokens x_1..x_t with the drafter's distribution q_i at each position.
// Every q_i must put positive mass on its own draft token.
struct DraftBatch {
  std::vector<int> tokens;
  std::vector<Categorical> probs;

  int size() const { return static_cast<int>(tokens.size()); }
  void validate() const;
};

// Result of verifying a batch: the accepted prefix plus one corrected/bonus
// token, and the verifier's distribution p_1..p_{n+1} for each output
// position (the unmodified p_{n+1} even when position n+1 was resampled from
// the residual; that is what makes the output reusable as a draft upstream).
struct VerifyOutcome {
  int accepted_count = 0;
  std::vector<int> output_tokens;
  std::vector<Categorical> output_probs;
  bool rejected = false;  // accepted_count < batch size
};

// Normalized positive part of p - q, sampled after a rejection so that the
// marginal output law equals p. Throws degenerate_residual_error when the
// normalizer vanishes (p == q up to 1e-15); a genuine rejection can never
// reach that state.
Categorical residual_distribution(const Categorical& p, const Categorical& q);

// Token verification and correction. Walks the batch in order, accepting
// x_i with probability min(1, p_i(x_i)/q_i(x_i)); on the first rejection the
// corrected token is sampled from residual_distribution(p_{n+1}, q_{n+1}),
// and if everything is accepted the bonus token is sampled from p_{t+1}.
// verifier_probs must hold the t+1 prefix distributions p_1..p_{t+1}.
VerifyOutcome verify(const DraftBatch& batch, std::span<const Categorical> verifier_probs,
                     RandomSource& rng);

// Exact marginal law of the single-token output of one draft/verify step,
// computed by total probability over the draft token, the accept/reject
// branch and the residual resample. Equals p (the correctness theorem); kept
// as an independent oracle for the sampled path.
Categorical exact_output_distribution(const Categorical& p, const Categorical& q);

}  // namespace hsd
