#include "hsd/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hsd/errors.hpp"

namespace hsd {

namespace {

constexpr double kTieTolerance = 1e-12;

// Partial hierarchy decoded from a path suffix, in plan order (base first).
struct Suffix {
  std::vector<int> models;
  std::vector<int> quotas;
};

// Tie order: fewer models, then lexicographically smaller T, then smaller
// sigma. Comparing suffixes is consistent with comparing the completed plans
// because competing suffixes at a vertex share the path prefix above it.
bool tie_less(const Suffix& a, const Suffix& b) {
  if (a.models.size() != b.models.size()) return a.models.size() < b.models.size();
  if (a.quotas != b.quotas) return a.quotas < b.quotas;
  return a.models < b.models;
}

struct Candidate {
  double value;
  Suffix suffix;
};

void consider(Candidate& best, double value, Suffix suffix) {
  const bool better = value < best.value - kTieTolerance;
  const bool tied = !better && value <= best.value + kTieTolerance;
  if (better || (tied && tie_less(suffix, best.suffix))) {
    best.value = value;
    best.suffix = std::move(suffix);
  }
}

}  // namespace

GspGraph build_graph(const Problem& problem) {
  problem.validate();
  GspGraph g;
  g.drafters = problem.drafter_count();
  g.t_max = problem.t_max;
  g.target_model = problem.target_index();

  g.vertices.push_back({GspGraph::Vertex::Kind::Source, -1, 0});
  for (int i = 0; i < g.drafters; ++i) {
    for (int j = 1; j <= g.t_max; ++j) {
      g.vertices.push_back({GspGraph::Vertex::Kind::Grid, i, j});
    }
  }
  for (int i = 0; i < g.drafters; ++i) {
    g.vertices.push_back({GspGraph::Vertex::Kind::Loop, i, 0});
  }

  GammaTable gamma;
  const double c_target = problem.target_cost();

  // source -> (i, j): the target's per-token verification rate
  for (int i = 0; i < g.drafters; ++i) {
    const double a = problem.alpha.at(i, g.target_model);
    for (int j = 1; j <= g.t_max; ++j) {
      const double mult = top_rate(a, j);
      g.edges.push_back({g.source(), g.grid_index(i, j), mult, mult * c_target});
    }
  }
  // (i, j) -> (k, l) for i > k, j >= l: expected rounds model i waits on k
  for (int i = 0; i < g.drafters; ++i) {
    const double c_i = problem.models[static_cast<size_t>(i)].cost;
    for (int j = 1; j <= g.t_max; ++j) {
      for (int k = 0; k < i; ++k) {
        const double a = problem.alpha.at(k, i);
        for (int l = 1; l <= j; ++l) {
          const double mult = gamma.get(a, l, j);
          g.edges.push_back({g.grid_index(i, j), g.grid_index(k, l), mult, mult * c_i});
        }
      }
    }
  }
  // (i, j) -> (i, loop): model i is the base, drafting j tokens per round
  for (int i = 0; i < g.drafters; ++i) {
    const double c_i = problem.models[static_cast<size_t>(i)].cost;
    for (int j = 1; j <= g.t_max; ++j) {
      g.edges.push_back({g.grid_index(i, j), g.loop_index(i), 1.0, j * c_i});
    }
  }
  // terminal lossy self-loops
  for (int i = 0; i < g.drafters; ++i) {
    g.edges.push_back({g.loop_index(i), g.loop_index(i), 0.5, 0.0});
  }
  return g;
}

OptimizationResult solve(const GspGraph& graph) {
  const int n_vertices = static_cast<int>(graph.vertices.size());
  std::vector<std::vector<int>> out_edges(static_cast<size_t>(n_vertices));
  for (int e = 0; e < static_cast<int>(graph.edges.size()); ++e) {
    out_edges[static_cast<size_t>(graph.edges[static_cast<size_t>(e)].from)].push_back(e);
  }

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<Candidate> best(static_cast<size_t>(n_vertices), {inf, {}});

  // Loop vertices terminate paths at zero cost; grid vertices in increasing
  // model order (edges only point to strictly smaller models); source last.
  for (int i = 0; i < graph.drafters; ++i) {
    best[static_cast<size_t>(graph.loop_index(i))] = {0.0, {}};
  }
  for (int i = 0; i < graph.drafters; ++i) {
    for (int j = 1; j <= graph.t_max; ++j) {
      const int v = graph.grid_index(i, j);
      Candidate& bv = best[static_cast<size_t>(v)];
      for (int e : out_edges[static_cast<size_t>(v)]) {
        const GspGraph::Edge& edge = graph.edges[static_cast<size_t>(e)];
        const Candidate& bw = best[static_cast<size_t>(edge.to)];
        if (bw.value == inf) continue;
        const double value = edge.cost + edge.multiplier * bw.value;
        if (value > bv.value + kTieTolerance) continue;
        Suffix suffix = bw.suffix;
        suffix.models.push_back(i);
        suffix.quotas.push_back(j);
        consider(bv, value, std::move(suffix));
      }
      if (bv.value == inf) {
        throw internal_error("solve: grid vertex with no path to a loop vertex");
      }
    }
  }

  Candidate source_best{inf, {}};
  for (int e : out_edges[static_cast<size_t>(graph.source())]) {
    const GspGraph::Edge& edge = graph.edges[static_cast<size_t>(e)];
    const Candidate& bw = best[static_cast<size_t>(edge.to)];
    if (bw.value == inf) continue;
    const double value = edge.cost + edge.multiplier * bw.value;
    if (value > source_best.value + kTieTolerance) continue;
    consider(source_best, value, bw.suffix);
  }
  if (source_best.value == inf) {
    throw internal_error("solve: no augmented path from the source");
  }

  OptimizationResult result;
  result.solver = "dag-dp";
  result.latency = source_best.value;
  result.plan.sigma = source_best.suffix.models;
  result.plan.sigma.push_back(graph.target_model);
  result.plan.t_params = source_best.suffix.quotas;
  return result;
}

OptimizationResult optimize(const Problem& problem) {
  OptimizationResult result = solve(build_graph(problem));
  result.speedup = problem.target_cost() / result.latency;
  return result;
}

OptimizationResult brute_force(const Problem& problem, const BruteForceOptions& options) {
  problem.validate();
  const int k = problem.drafter_count();
  if (k > options.max_drafters || problem.t_max > options.max_t) {
    throw input_error("brute_force: instance too large (guard: K <= " +
                      std::to_string(options.max_drafters) +
                      ", t_max <= " + std::to_string(options.max_t) + ")");
  }

  const double inf = std::numeric_limits<double>::infinity();
  double best_value = inf;
  HierarchyPlan best_plan;

  auto consider_plan = [&](const HierarchyPlan& plan, double value) {
    const bool better = value < best_value - kTieTolerance;
    const bool tied = !better && value <= best_value + kTieTolerance;
    if (better ||
        (tied && (plan.sigma.size() < best_plan.sigma.size() ||
                  (plan.sigma.size() == best_plan.sigma.size() &&
                   (plan.t_params < best_plan.t_params ||
                    (plan.t_params == best_plan.t_params && plan.sigma < best_plan.sigma)))))) {
      best_value = value;
      best_plan = plan;
    }
  };

  auto score = [&](const HierarchyPlan& plan) {
    consider_plan(plan, detail::latency_formula(problem, plan.sigma, plan.t_params));
  };

  // Enumerate nondecreasing quota vectors depth-first.
  auto sweep_quotas = [&](auto&& self, HierarchyPlan& plan, size_t depth) -> void {
    if (depth == plan.sigma.size() - 1) {
      score(plan);
      return;
    }
    const int low = depth == 0 ? 1 : plan.t_params[depth - 1];
    for (int t = low; t <= problem.t_max; ++t) {
      plan.t_params[depth] = t;
      self(self, plan, depth + 1);
    }
  };

  // All 2^K - 1 nonempty drafter subsets, ascending, plus the target.
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    HierarchyPlan plan;
    for (int i = 0; i < k; ++i) {
      if (mask & (1u << i)) plan.sigma.push_back(i);
    }
    plan.sigma.push_back(problem.target_index());
    plan.t_params.assign(plan.sigma.size() - 1, 1);
    if (options.allow_decreasing_t) {
      // full cartesian sweep
      auto sweep_all = [&](auto&& self, size_t depth) -> void {
        if (depth == plan.t_params.size()) {
          score(plan);
          return;
        }
        for (int t = 1; t <= problem.t_max; ++t) {
          plan.t_params[depth] = t;
          self(self, depth + 1);
        }
      };
      sweep_all(sweep_all, 0);
    } else {
      sweep_quotas(sweep_quotas, plan, 0);
    }
  }

  OptimizationResult result;
  result.solver = "brute-force";
  result.plan = std::move(best_plan);
  result.latency = best_value;
  result.speedup = problem.target_cost() / best_value;
  return result;
}

std::string export_dot(const GspGraph& graph) {
  std::ostringstream out;
  out.precision(6);
  auto vertex_id = [&](int v) -> std::string {
    const GspGraph::Vertex& vx = graph.vertices[static_cast<size_t>(v)];
    switch (vx.kind) {
      case GspGraph::Vertex::Kind::Source:
        return "m" + std::to_string(graph.target_model);
      case GspGraph::Vertex::Kind::Grid:
        return "m" + std::to_string(vx.model) + "_" + std::to_string(vx.quota);
      case GspGraph::Vertex::Kind::Loop:
      default:
        return "m" + std::to_string(vx.model) + "_loop";
    }
  };
  auto vertex_label = [&](int v) -> std::string {
    const GspGraph::Vertex& vx = graph.vertices[static_cast<size_t>(v)];
    switch (vx.kind) {
      case GspGraph::Vertex::Kind::Source:
        return "(M" + std::to_string(graph.target_model) + ")";
      case GspGraph::Vertex::Kind::Grid:
        return "(M" + std::to_string(vx.model) + ", " + std::to_string(vx.quota) + ")";
      case GspGraph::Vertex::Kind::Loop:
      default:
        return "(M" + std::to_string(vx.model) + ", L)";
    }
  };

  out << "digraph hierarchy_reduction {\n";
  out << "  rankdir=TB;\n";
  for (int v = 0; v < static_cast<int>(graph.vertices.size()); ++v) {
    out << "  " << vertex_id(v) << " [label=\"" << vertex_label(v) << "\"];\n";
  }
  for (const auto& e : graph.edges) {
    out << "  " << vertex_id(e.from) << " -> " << vertex_id(e.to) << " [label=\"mu="
        << e.multiplier << ", c=" << e.cost << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace hsd
