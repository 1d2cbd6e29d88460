#pragma once

#include <string>
#include <vector>

#include "hsd/model.hpp"
#include "hsd/problem.hpp"

namespace hsd {

// Order-m Markov next-token model: one categorical row per length-m context
// window (short contexts are left-padded with token 0). Immutable after
// construction apart from the cost-emulation knob.
class MarkovModel final : public LanguageModel {
 public:
  MarkovModel(int order, int vocab, double cost, std::vector<Categorical> rows);

  int vocab_size() const override { return vocab_; }
  double cost() const override { return cost_; }
  int order() const { return order_; }
  Categorical next_distribution(std::span<const int> context) const override;
  // Pays the emulated latency once for the whole batch (one forward pass).
  std::vector<Categorical> prefix_distributions(std::span<const int> context,
                                                std::span<const int> continuation) const override;

  const Categorical& row(int window_index) const {
    return rows_[static_cast<size_t>(window_index)];
  }

  // When scale > 0, every next_distribution call busy-waits for
  // cost() * scale seconds so measured wall time tracks the nominal cost.
  // Off by default.
  void set_cost_emulation(double seconds_per_cost_unit) { emulate_scale_ = seconds_per_cost_unit; }

 private:
  int order_;
  int vocab_;
  double cost_;
  std::vector<Categorical> rows_;
  double emulate_scale_ = 0.0;
};

// Builds count models over a shared vocabulary with controllable agreement:
// model i's row for each context is a mixture
//   agreement[i] * target_row + (1 - agreement[i]) * noise_row
// with one seed-derived noise row per context shared by the whole family, so
// pairwise TV distance is exactly |agreement gap| * TV(noise, target) and
// agreement is monotone in the schedule. The last entry must be 1 (the
// target itself). Costs default to a geometric ramp ending at 1.
std::vector<MarkovModel> make_family(uint64_t seed, int count, int vocab_size,
                                     const std::vector<double>& agreement,
                                     std::vector<double> costs = {}, int order = 1);

// alpha_{i,j} = mean over sampled contexts of acceptance_rate(p_j, p_i).
// Contexts are drawn from the target model's own behavior: each context is a
// burn_in-step rollout of the last model, seeded.
AcceptanceMatrix estimate_acceptance_matrix(std::span<const LanguageModel* const> models,
                                            int n_contexts, uint64_t seed, int burn_in = 10);

// Family spec JSON:
//   { "seed": int, "vocab_size": int, "agreement": [float], "costs": [float] }
std::vector<MarkovModel> load_family(const std::string& json_text);
std::vector<MarkovModel> load_family_file(const std::string& path);

std::vector<const LanguageModel*> model_pointers(const std::vector<MarkovModel>& family);

// The Problem induced by a family: its costs, an estimated acceptance
// matrix, and the given t_max.
Problem family_problem(const std::vector<MarkovModel>& family, int n_contexts, uint64_t seed,
                       int t_max);

}  // namespace hsd
