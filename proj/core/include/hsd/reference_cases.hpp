#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "hsd/problem.hpp"

namespace hsd::reference {

// Two hand-constructed six-model configurations with published optimal
// speedups as the candidate pool grows one (cheapest) model at a time, and a
// 10x8 grid study of a three-model family (target A, drafter B, drafter C of
// varying cost and agreement). All constants are embedded; nothing is
// fetched.

Problem example1();  // costs 1e-5 .. 33, strong chain agreement
Problem example2();  // costs 5e-5 .. 33, weaker chain agreement

// Published optimal speedups for k = 1..6 available models (the k most
// expensive ones; k=1 is the target alone).
const std::array<double, 6>& example1_speedups();
const std::array<double, 6>& example2_speedups();

// Grid axes: agreement rate between C and B (rows), cost of C (columns).
const std::array<double, 10>& grid_alpha_rows();
const std::array<double, 8>& grid_cost_columns();

// The three-model instance for one grid cell. alpha(C,A) uses the triangle
// lower bound max(0, alpha_CB + alpha_BA - 1); alpha_BA is fixed at 0.5,
// costs at (cost_c, 256, 1024).
Problem grid_problem(double alpha_cb, double cost_c);

// Hierarchy composition label: "A-B", "A-C" or "A-B-C".
std::string grid_label(const std::vector<int>& sigma);

struct ReproCell {
  std::string id;
  double published = 0.0;
  double computed = 0.0;
  double rel_err = 0.0;
  bool within_tolerance = true;
  std::string published_label;  // grid only
  std::string computed_label;   // grid only
  std::optional<double> simulated;  // ladders: coin-mode run of the chosen plan
};

struct ReproReport {
  std::string case_name;
  std::vector<ReproCell> cells;
  bool all_within_tolerance = true;
};

// Optimal speedup ladder for k = 1..6 available models, compared to the
// published values at ±3% relative. with_simulation adds a faithful
// coin-mode simulation of each chosen plan (overshoot forwarded), which is
// how the published numbers behave for deep hierarchies.
ReproReport reproduce_ladder(int which, bool with_simulation = true, uint64_t seed = 0,
                             long long sim_tokens = 200000);

// All 80 grid cells: speedups at ±0.01 absolute and hierarchy labels.
ReproReport reproduce_grid();

}  // namespace hsd::reference
