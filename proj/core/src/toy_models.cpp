#include "hsd/toy_models.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hsd/errors.hpp"
#include "hsd/rng.hpp"

namespace hsd {

namespace {

size_t table_size(int vocab, int order) {
  size_t n = 1;
  for (int i = 0; i < order; ++i) n *= static_cast<size_t>(vocab);
  return n;
}

// Window index of the last `order` tokens, left-padded with 0.
size_t window_index(std::span<const int> context, int vocab, int order) {
  size_t idx = 0;
  for (int k = order; k >= 1; --k) {
    const int pos = static_cast<int>(context.size()) - k;
    const int tok = pos >= 0 ? context[static_cast<size_t>(pos)] : 0;
    idx = idx * static_cast<size_t>(vocab) + static_cast<size_t>(tok);
  }
  return idx;
}

std::vector<double> random_row(int vocab, RandomSource& rng) {
  std::vector<double> row(static_cast<size_t>(vocab));
  double sum = 0.0;
  for (double& v : row) {
    const double u = rng.uniform01();
    v = u * u + 1e-4;  // skewed rows, bounded away from zero
    sum += v;
  }
  for (double& v : row) v /= sum;
  return row;
}

}  // namespace

MarkovModel::MarkovModel(int order, int vocab, double cost, std::vector<Categorical> rows)
    : order_(order), vocab_(vocab), cost_(cost), rows_(std::move(rows)) {
  if (order_ < 1) throw input_error("markov model: order must be >= 1");
  if (vocab_ < 2) throw input_error("markov model: vocab_size must be >= 2");
  if (!(cost_ > 0.0)) throw input_error("markov model: cost must be positive");
  if (rows_.size() != table_size(vocab_, order_)) {
    throw input_error("markov model: need one row per context window");
  }
  for (const auto& r : rows_) {
    if (r.size() != vocab_) throw input_error("markov model: row dimension mismatch");
  }
}

namespace {
void spin_for(double seconds) {
  const auto until =
      std::chrono::steady_clock::now() + std::chrono::duration<double>(seconds);
  while (std::chrono::steady_clock::now() < until) {
  }
}
}  // namespace

Categorical MarkovModel::next_distribution(std::span<const int> context) const {
  if (emulate_scale_ > 0.0) spin_for(cost_ * emulate_scale_);
  return rows_[window_index(context, vocab_, order_)];
}

std::vector<Categorical> MarkovModel::prefix_distributions(
    std::span<const int> context, std::span<const int> continuation) const {
  if (emulate_scale_ > 0.0) spin_for(cost_ * emulate_scale_);
  std::vector<int> buf(context.begin(), context.end());
  std::vector<Categorical> out;
  out.reserve(continuation.size() + 1);
  out.push_back(rows_[window_index(buf, vocab_, order_)]);
  for (int tok : continuation) {
    buf.push_back(tok);
    out.push_back(rows_[window_index(buf, vocab_, order_)]);
  }
  return out;
}

std::vector<MarkovModel> make_family(uint64_t seed, int count, int vocab_size,
                                     const std::vector<double>& agreement,
                                     std::vector<double> costs, int order) {
  if (count < 2) throw input_error("make_family: need at least 2 models");
  if (static_cast<int>(agreement.size()) != count) {
    throw input_error("make_family: agreement schedule length must equal model count");
  }
  for (size_t i = 0; i < agreement.size(); ++i) {
    if (agreement[i] < 0.0 || agreement[i] > 1.0) {
      throw input_error("make_family: agreement entries must be in [0, 1]");
    }
    if (i > 0 && agreement[i] < agreement[i - 1]) {
      throw input_error("make_family: agreement schedule must be nondecreasing");
    }
  }
  if (std::fabs(agreement.back() - 1.0) > 1e-12) {
    throw input_error("make_family: last agreement entry must be 1 (the target)");
  }
  if (costs.empty()) {
    costs.resize(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
      costs[static_cast<size_t>(i)] = std::pow(4.0, i - (count - 1));
    }
  }
  if (static_cast<int>(costs.size()) != count) {
    throw input_error("make_family: costs length must equal model count");
  }

  RandomSource rng(seed);
  const size_t n_rows = table_size(vocab_size, order);
  std::vector<std::vector<double>> target_rows(n_rows), noise_rows(n_rows);
  for (size_t r = 0; r < n_rows; ++r) target_rows[r] = random_row(vocab_size, rng);
  for (size_t r = 0; r < n_rows; ++r) noise_rows[r] = random_row(vocab_size, rng);

  std::vector<MarkovModel> family;
  family.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double w = agreement[static_cast<size_t>(i)];
    std::vector<Categorical> rows;
    rows.reserve(n_rows);
    for (size_t r = 0; r < n_rows; ++r) {
      std::vector<double> mix(static_cast<size_t>(vocab_size));
      for (int x = 0; x < vocab_size; ++x) {
        mix[static_cast<size_t>(x)] = w * target_rows[r][static_cast<size_t>(x)] +
                                      (1.0 - w) * noise_rows[r][static_cast<size_t>(x)];
      }
      rows.emplace_back(std::move(mix));
    }
    family.emplace_back(order, vocab_size, costs[static_cast<size_t>(i)], std::move(rows));
  }
  return family;
}

AcceptanceMatrix estimate_acceptance_matrix(std::span<const LanguageModel* const> models,
                                            int n_contexts, uint64_t seed, int burn_in) {
  if (models.empty()) throw input_error("estimate_acceptance_matrix: no models");
  if (n_contexts < 1) throw input_error("estimate_acceptance_matrix: n_contexts must be >= 1");
  const int vocab = models.front()->vocab_size();
  for (const auto* m : models) {
    if (m->vocab_size() != vocab) {
      throw input_error("estimate_acceptance_matrix: vocabulary mismatch");
    }
  }
  const int n = static_cast<int>(models.size());
  const LanguageModel& target = *models.back();

  AcceptanceMatrix acc(n, 0.0);
  RandomSource rng(seed);
  std::vector<Categorical> dists;
  dists.reserve(static_cast<size_t>(n));
  for (int c = 0; c < n_contexts; ++c) {
    std::vector<int> ctx{0};
    for (int b = 0; b < burn_in; ++b) {
      ctx.push_back(target.generate(ctx, rng).first);
    }
    dists.clear();
    for (const auto* m : models) dists.push_back(m->next_distribution(ctx));
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        acc.set(i, j,
                acc.at(i, j) + acceptance_rate(dists[static_cast<size_t>(j)],
                                               dists[static_cast<size_t>(i)]));
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      acc.set(i, j, acc.at(i, j) / static_cast<double>(n_contexts));
    }
  }
  return acc;
}

std::vector<MarkovModel> load_family(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw input_error(std::string("family spec: parse error: ") + e.what());
  }
  try {
    const uint64_t seed = doc.at("seed").get<uint64_t>();
    const int vocab = doc.at("vocab_size").get<int>();
    const auto agreement = doc.at("agreement").get<std::vector<double>>();
    std::vector<double> costs;
    if (doc.contains("costs")) costs = doc["costs"].get<std::vector<double>>();
    return make_family(seed, static_cast<int>(agreement.size()), vocab, agreement,
                       std::move(costs));
  } catch (const nlohmann::json::exception& e) {
    throw input_error(std::string("family spec: schema error: ") + e.what());
  }
}

std::vector<MarkovModel> load_family_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open family spec: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_family(buf.str());
}

std::vector<const LanguageModel*> model_pointers(const std::vector<MarkovModel>& family) {
  std::vector<const LanguageModel*> out;
  out.reserve(family.size());
  for (const auto& m : family) out.push_back(&m);
  return out;
}

Problem family_problem(const std::vector<MarkovModel>& family, int n_contexts, uint64_t seed,
                       int t_max) {
  Problem problem;
  problem.t_max = t_max;
  problem.vocab_size = family.front().vocab_size();
  int id = 0;
  for (const auto& m : family) {
    problem.models.push_back({id, "m" + std::to_string(id), m.cost()});
    ++id;
  }
  const auto ptrs = model_pointers(family);
  problem.alpha = estimate_acceptance_matrix(ptrs, n_contexts, seed);
  problem.validate();
  return problem;
}

}  // namespace hsd
