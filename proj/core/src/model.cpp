#include "hsd/model.hpp"

namespace hsd {

std::pair<int, Categorical> LanguageModel::generate(std::span<const int> context,
                                                    RandomSource& rng) const {
  Categorical dist = next_distribution(context);
  const int token = rng.categorical(dist.span());
  return {token, std::move(dist)};
}

std::vector<Categorical> LanguageModel::prefix_distributions(
    std::span<const int> context, std::span<const int> continuation) const {
  std::vector<int> buf(context.begin(), context.end());
  buf.reserve(context.size() + continuation.size());
  std::vector<Categorical> out;
  out.reserve(continuation.size() + 1);
  out.push_back(next_distribution(buf));
  for (int tok : continuation) {
    buf.push_back(tok);
    out.push_back(next_distribution(buf));
  }
  return out;
}

}  // namespace hsd
