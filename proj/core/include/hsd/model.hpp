#pragma once

#include <span>
#include <utility>
#include <vector>

#include "hsd/categorical.hpp"
#include "hsd/rng.hpp"

namespace hsd {

// Abstract next-token model over integer token ids. The next-token
// distribution is deterministic for a fixed context; all sampling goes
// through the caller's RandomSource.
//
// Cost accounting is the engine's job: one generate() and one
// prefix_distributions() call each count as a single forward pass of
// nominal cost cost(), regardless of batch length.
class LanguageModel {
 public:
  virtual ~LanguageModel() = default;

  virtual int vocab_size() const = 0;
  virtual double cost() const = 0;
  virtual Categorical next_distribution(std::span<const int> context) const = 0;

  // Sample one token; returns (token, distribution it was drawn from).
  std::pair<int, Categorical> generate(std::span<const int> context, RandomSource& rng) const;

  // The t+1 next-token distributions for context, context+x_1, ...,
  // context+x_1..x_t — the verifier's single parallel pass over a candidate
  // continuation. Overridable so implementations can honor the one-forward-
  // pass cost model (e.g. emulated latency paid once per batch).
  virtual std::vector<Categorical> prefix_distributions(std::span<const int> context,
                                                        std::span<const int> continuation) const;
};

}  // namespace hsd
