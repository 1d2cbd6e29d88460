#include "hsd/categorical.hpp"

#include <cmath>
#include <string>

#include "hsd/errors.hpp"

namespace hsd {

Categorical::Categorical(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw input_error("categorical: empty probability vector");
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw input_error("categorical: entries must be finite and nonnegative");
    }
    sum += p;
  }
  if (std::fabs(sum - 1.0) > kSumTolerance) {
    throw input_error("categorical: probabilities sum to " + std::to_string(sum) +
                      ", outside tolerance of 1");
  }
  for (double& p : probs_) p /= sum;
}

Categorical Categorical::uniform(int vocab_size) {
  return Categorical(std::vector<double>(static_cast<size_t>(vocab_size),
                                         1.0 / static_cast<double>(vocab_size)));
}

Categorical Categorical::point_mass(int token, int vocab_size) {
  std::vector<double> p(static_cast<size_t>(vocab_size), 0.0);
  p[static_cast<size_t>(token)] = 1.0;
  return Categorical(std::move(p));
}

double total_variation(const Categorical& p, const Categorical& q) {
  if (p.size() != q.size()) {
    throw input_error("total_variation: dimension mismatch (" + std::to_string(p.size()) +
                      " vs " + std::to_string(q.size()) + ")");
  }
  double l1 = 0.0;
  for (int i = 0; i < p.size(); ++i) l1 += std::fabs(p[i] - q[i]);
  return 0.5 * l1;
}

double acceptance_rate(const Categorical& p, const Categorical& q) {
  return 1.0 - total_variation(p, q);
}

}  // namespace hsd
