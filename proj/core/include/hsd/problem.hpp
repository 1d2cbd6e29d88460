#pragma once

#include <optional>
#include <string>
#include <vector>

namespace hsd {

// One model in the candidate pool. Index K (the last one) is the target.
// Cost is the nominal time of one forward pass; verifying a batch costs the
// same as generating one token.
struct ModelSpec {
  int id = 0;
  std::string name;
  double cost = 0.0;
};

// Pairwise acceptance rates. Only entries (i, j) with i < j are meaningful;
// the accessor completes the matrix symmetrically (TV distance is symmetric)
// and reports 1 on the diagonal.
class AcceptanceMatrix {
 public:
  AcceptanceMatrix() = default;
  AcceptanceMatrix(int n, double fill = 0.0)
      : n_(n), data_(static_cast<size_t>(n) * static_cast<size_t>(n), fill) {}
  explicit AcceptanceMatrix(std::vector<std::vector<double>> rows);

  int size() const { return n_; }

  double at(int i, int j) const {
    if (i == j) return 1.0;
    if (i > j) std::swap(i, j);
    return data_[static_cast<size_t>(i) * static_cast<size_t>(n_) + static_cast<size_t>(j)];
  }

  void set(int i, int j, double value) {
    if (i > j) std::swap(i, j);
    data_[static_cast<size_t>(i) * static_cast<size_t>(n_) + static_cast<size_t>(j)] = value;
  }

 private:
  int n_ = 0;
  std::vector<double> data_;
};

struct MatrixDiagnostic {
  enum class Kind {
    range_error,       // entry outside [0, 1]
    triangle_warning,  // alpha_ij + alpha_jk > alpha_ik + 1
  };
  Kind kind;
  int i = 0, j = 0, k = 0;
  double lhs = 0.0, rhs = 0.0;

  bool is_error() const { return kind == Kind::range_error; }
  std::string describe() const;
};

// Checks range constraints (errors) and the TV triangle inequality
// alpha_ij + alpha_jk <= alpha_ik + 1 for i < j < k (warnings; hand-written
// matrices may be hypothetical and the optimizer stays well-defined on them).
// Returns an empty list iff every constraint holds.
std::vector<MatrixDiagnostic> validate_matrix(const AcceptanceMatrix& alpha);

// Instance of the hierarchy-selection problem: candidate models (target
// last), pairwise acceptance rates, and the cap on any T parameter.
struct Problem {
  std::vector<ModelSpec> models;
  AcceptanceMatrix alpha;
  int t_max = 15;
  std::optional<int> vocab_size;

  int target_index() const { return static_cast<int>(models.size()) - 1; }
  int drafter_count() const { return static_cast<int>(models.size()) - 1; }
  double target_cost() const { return models.back().cost; }

  // Throws input_error unless there are >= 2 models, costs are positive,
  // t_max >= 1 and all alpha entries are in range.
  void validate() const;

  // The sub-problem over a subset of model indices (ascending, ending at the
  // target); models are re-indexed 0..kept-1.
  Problem restricted_to(const std::vector<int>& kept) const;
};

// Chosen hierarchy: ascending model subset sigma ending at the target, plus
// per-level token quotas. t_params[n] is T_n, the number of verified tokens
// level n accumulates before returning upstream; T is nondecreasing (the
// reduction's edge constraint j >= l).
struct HierarchyPlan {
  std::vector<int> sigma;
  std::vector<int> t_params;

  int levels() const { return static_cast<int>(sigma.size()); }

  // Throws input_error if the plan is malformed or inconsistent with a
  // problem of n_models models and the given t_max cap.
  void validate(int n_models, int t_max) const;

  bool operator==(const HierarchyPlan&) const = default;
};

// Parses a problem-config JSON document:
//   { "vocab_size"?: int,
//     "models": [{"name": str, "cost": float}, ...],
//     "alpha": [[float]],          // full square; entries below the diagonal ignored
//     "t_max": int }
// The target model is the last entry. Range violations in alpha are errors;
// triangle violations are collected into *warnings when given.
Problem load_problem(const std::string& json_text,
                     std::vector<MatrixDiagnostic>* warnings = nullptr);

Problem load_problem_file(const std::string& path,
                          std::vector<MatrixDiagnostic>* warnings = nullptr);

}  // namespace hsd
