#pragma once

#include <span>
#include <vector>

namespace hsd {

// Probability vector over a shared token vocabulary, indexed by token id.
// Entries are nonnegative and sum to 1; construction renormalizes when the
// input sum is within 1e-9 of 1 and rejects otherwise.
class Categorical {
 public:
  static constexpr double kSumTolerance = 1e-9;

  explicit Categorical(std::vector<double> probs);

  static Categorical uniform(int vocab_size);
  static Categorical point_mass(int token, int vocab_size);

  int size() const { return static_cast<int>(probs_.size()); }
  double operator[](int i) const { return probs_[static_cast<size_t>(i)]; }
  const std::vector<double>& probs() const { return probs_; }
  std::span<const double> span() const { return probs_; }

  bool operator==(const Categorical&) const = default;

 private:
  std::vector<double> probs_;
};

// Acceptance rate between a verifier distribution p and a draft distribution
// q: one minus their total variation distance. Symmetric, in [0, 1], equal to
// 1 iff p == q.
double acceptance_rate(const Categorical& p, const Categorical& q);

// Half the L1 distance between two probability vectors.
double total_variation(const Categorical& p, const Categorical& q);

}  // namespace hsd
