#pragma once

#include <string>
#include <vector>

#include "hsd/latency.hpp"
#include "hsd/problem.hpp"

namespace hsd {

// Flow-with-multipliers graph encoding the hierarchy search space.
// Vertices: the source (target model), one grid vertex (model i, quota j)
// per drafter i and j in [1, t_max], and one self-looping terminal per
// drafter. Edge multipliers scale flow; a unit of source flow routed along
// a path source -> (i_1, j_1) -> ... -> (i_m, j_m) -> loop accumulates
// exactly the analytical latency of the decoded hierarchy.
struct GspGraph {
  struct Vertex {
    enum class Kind { Source, Grid, Loop };
    Kind kind;
    int model = -1;  // drafter index for Grid/Loop
    int quota = 0;   // j for Grid vertices
  };
  struct Edge {
    int from = 0, to = 0;
    double multiplier = 0.0;
    double cost = 0.0;
  };

  int drafters = 0;  // K: number of candidate draft models
  int t_max = 0;
  int target_model = 0;  // = K
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;

  int source() const { return 0; }
  int grid_index(int model, int quota) const { return 1 + model * t_max + (quota - 1); }
  int loop_index(int model) const { return 1 + drafters * t_max + model; }
};

// Builds the reduction graph: 1 + K*t_max + K vertices and edges
//   source -> (i, j)                mult (1-a_iK)/(1-a_iK^(j+1)), cost mult*c_K
//   (i, j) -> (k, l), i > k, j >= l mult gamma(a_ki, l, j),       cost mult*c_i
//   (i, j) -> (i, loop)             mult 1,                        cost j*c_i
//   (i, loop) self-loop             mult 1/2,                      cost 0
GspGraph build_graph(const Problem& problem);

struct OptimizationResult {
  HierarchyPlan plan;
  double latency = 0.0;
  double speedup = 0.0;
  std::string solver;  // "dag-dp" or "brute-force"
};

// Exact polynomial solve. Every lossy cycle in this graph family is a
// zero-cost terminal self-loop and the rest is a DAG (model index strictly
// decreases along edges), so the optimum is a cheapest simple path to a
// loop vertex: suffix DP S(v) = min over edges (v,w) of c + mult * S(w)
// in reverse topological order, O(|E|).
//
// Ties within 1e-12 prefer fewer models, then the lexicographically smaller
// T vector, then the lexicographically smaller sigma.
OptimizationResult solve(const GspGraph& graph);

// Convenience: build_graph + solve.
OptimizationResult optimize(const Problem& problem);

struct BruteForceOptions {
  // Exploration switch: also score T vectors that decrease up the hierarchy
  // (outside the reduction's j >= l constraint). Reporting/comparison only.
  bool allow_decreasing_t = false;
  int max_drafters = 6;  // combinatorial guard
  int max_t = 6;
};

// Exhaustive oracle over all ordered subsets ending at the target and all
// quota vectors; same scoring (expected_latency) and tie-break as solve.
// Throws input_error when the instance exceeds the guard.
OptimizationResult brute_force(const Problem& problem, const BruteForceOptions& options = {});

// GraphViz DOT text with multipliers and costs as edge labels; vertex and
// edge order deterministic.
std::string export_dot(const GspGraph& graph);

}  // namespace hsd
