#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hsd/engine.hpp"
#include "hsd/errors.hpp"
#include "hsd/latency.hpp"
#include "hsd/optimizer.hpp"
#include "hsd/problem.hpp"
#include "hsd/reference_cases.hpp"
#include "hsd/simulator.hpp"
#include "hsd/toy_models.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitToleranceFailure = 1;
constexpr int kExitInputError = 2;

struct GlobalOptions {
  uint64_t seed = 0;
  std::string format = "text";
  std::string output;
};

void emit(const GlobalOptions& global, const std::string& payload) {
  if (global.output.empty()) {
    std::cout << payload;
    if (!payload.empty() && payload.back() != '\n') std::cout << '\n';
  } else {
    std::ofstream out(global.output, std::ios::binary);
    if (!out) throw hsd::input_error("cannot open output file: " + global.output);
    out << payload;
    if (!payload.empty() && payload.back() != '\n') out << '\n';
  }
}

void print_warnings(const std::vector<hsd::MatrixDiagnostic>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w.describe() << "\n";
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream out;
  out << std::setprecision(precision) << v;
  return out.str();
}

json plan_to_json(const hsd::HierarchyPlan& plan) {
  return json{{"sigma", plan.sigma}, {"t_params", plan.t_params}};
}

json sim_report_to_json(const hsd::SimReport& report) {
  json levels = json::array();
  for (size_t i = 0; i < report.levels.size(); ++i) {
    levels.push_back(json{{"level", i},
                          {"rounds", report.levels[i].rounds},
                          {"drafted_tokens", report.levels[i].drafted_tokens},
                          {"accepted_tokens", report.levels[i].accepted_tokens},
                          {"gain_histogram", report.levels[i].gain_histogram}});
  }
  return json{{"mean_latency", report.mean_latency},
              {"std_error", report.std_error},
              {"speedup", report.speedup},
              {"total_tokens", report.total_tokens},
              {"trials", report.trials},
              {"levels", levels}};
}

std::string sim_report_to_text(const hsd::SimReport& report) {
  std::ostringstream out;
  out << "mean latency/token: " << fmt(report.mean_latency) << "\n"
      << "std error:          " << fmt(report.std_error) << "\n"
      << "speedup:            " << fmt(report.speedup) << "\n"
      << "tokens:             " << report.total_tokens << " over " << report.trials
      << " trial(s)\n";
  for (size_t i = 0; i < report.levels.size(); ++i) {
    const auto& ls = report.levels[i];
    out << "level " << i << ": rounds=" << ls.rounds << " drafted=" << ls.drafted_tokens
        << " accepted=" << ls.accepted_tokens;
    if (!ls.gain_histogram.empty()) {
      out << " gains=[";
      for (size_t g = 0; g < ls.gain_histogram.size(); ++g) {
        if (g) out << ", ";
        out << ls.gain_histogram[g];
      }
      out << "]";
    }
    out << "\n";
  }
  return out.str();
}

std::vector<int> parse_int_list(const std::string& text, const std::string& flag) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw hsd::input_error(flag + ": cannot parse '" + item + "' as an integer");
    }
  }
  if (out.empty()) throw hsd::input_error(flag + ": empty list");
  return out;
}

int cmd_optimize(const GlobalOptions& global, const std::string& config_path, int t_max_override,
                 bool use_brute_force) {
  std::vector<hsd::MatrixDiagnostic> warnings;
  hsd::Problem problem = hsd::load_problem_file(config_path, &warnings);
  print_warnings(warnings);
  if (t_max_override > 0) problem.t_max = t_max_override;

  const auto start = std::chrono::steady_clock::now();
  hsd::OptimizationResult result;
  if (use_brute_force) {
    result = hsd::brute_force(problem);
    result.speedup = problem.target_cost() / result.latency;
  } else {
    result = hsd::optimize(problem);
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (global.format == "json") {
    json doc = plan_to_json(result.plan);
    doc["latency"] = result.latency;
    doc["speedup"] = result.speedup;
    doc["solver"] = result.solver;
    doc["solve_seconds"] = elapsed;
    emit(global, doc.dump(2));
  } else {
    std::ostringstream out;
    out << "sigma:   [";
    for (size_t i = 0; i < result.plan.sigma.size(); ++i) {
      if (i) out << ", ";
      out << result.plan.sigma[i];
    }
    out << "]\nT:       [";
    for (size_t i = 0; i < result.plan.t_params.size(); ++i) {
      if (i) out << ", ";
      out << result.plan.t_params[i];
    }
    out << "]\nlatency: " << fmt(result.latency) << "\nspeedup: " << fmt(result.speedup)
        << "\nsolver:  " << result.solver << "\nsolve time: " << fmt(elapsed, 3) << " s\n";
    emit(global, out.str());
  }
  return kExitOk;
}

int cmd_latency(const GlobalOptions& global, const std::string& config_path,
                const std::string& sigma_text, const std::string& t_text) {
  std::vector<hsd::MatrixDiagnostic> warnings;
  const hsd::Problem problem = hsd::load_problem_file(config_path, &warnings);
  print_warnings(warnings);
  hsd::HierarchyPlan plan;
  plan.sigma = parse_int_list(sigma_text, "--sigma");
  plan.t_params = parse_int_list(t_text, "--t");
  const hsd::LatencyReport report = hsd::expected_latency(problem, plan);

  if (global.format == "json") {
    json doc = plan_to_json(plan);
    doc["latency"] = report.latency_per_token;
    doc["speedup"] = report.speedup;
    doc["level_factors"] = report.level_factors;
    emit(global, doc.dump(2));
  } else {
    std::ostringstream out;
    out << "latency/token: " << fmt(report.latency_per_token) << "\nspeedup:       "
        << fmt(report.speedup) << "\nlevel factors:";
    for (double f : report.level_factors) out << " " << fmt(f);
    out << "\n";
    emit(global, out.str());
  }
  return kExitOk;
}

int cmd_gamma(const GlobalOptions& global, uint64_t seed, double alpha, int t_i, int t_j,
              long long mc_trials) {
  const double value = hsd::gamma_rounds(alpha, t_i, t_j);
  hsd::MonteCarloEstimate mc;
  if (mc_trials > 0) {
    hsd::RandomSource rng(seed);
    mc = hsd::mc_gamma_rounds(alpha, t_i, t_j, mc_trials, rng);
  }

  if (global.format == "json") {
    json doc{{"alpha", alpha}, {"t_i", t_i}, {"t_j", t_j}, {"gamma", value}};
    if (mc_trials > 0) {
      doc["mc_mean"] = mc.mean;
      doc["mc_std_error"] = mc.std_error;
      doc["mc_trials"] = mc.trials;
    }
    emit(global, doc.dump(2));
  } else {
    std::ostringstream out;
    out << "gamma(" << alpha << ", " << t_i << ", " << t_j << ") = " << fmt(value, 12) << "\n";
    if (mc_trials > 0) {
      out << "monte carlo: " << fmt(mc.mean, 12) << " +/- " << fmt(mc.std_error) << " ("
          << mc.trials << " trials)\n";
    }
    emit(global, out.str());
  }
  return kExitOk;
}

int cmd_simulate(const GlobalOptions& global, const std::string& config_path,
                 const std::string& family_path, const std::string& sigma_text,
                 const std::string& t_text, long long tokens, int trials,
                 const std::string& mode, const std::string& cost_mode, bool forward_overshoot,
                 double emulate_cost_scale, int alpha_contexts) {
  hsd::SimConfig config;
  config.n_tokens = tokens;
  config.trials = trials;
  config.seed = global.seed;
  config.forward_overshoot = forward_overshoot;
  if (mode == "iid-coin") {
    config.acceptance = hsd::AcceptanceMode::IidCoin;
  } else if (mode == "model-based") {
    config.acceptance = hsd::AcceptanceMode::ModelBased;
  } else {
    throw hsd::input_error("--mode must be iid-coin or model-based");
  }
  if (cost_mode == "configured") {
    config.cost = hsd::CostMode::Configured;
  } else if (cost_mode == "wallclock") {
    config.cost = hsd::CostMode::MeasuredWallclock;
  } else {
    throw hsd::input_error("--cost-mode must be configured or wallclock");
  }

  hsd::HierarchyPlan plan;
  plan.sigma = parse_int_list(sigma_text, "--sigma");
  plan.t_params = parse_int_list(t_text, "--t");

  hsd::SimReport report;
  if (!family_path.empty()) {
    std::vector<hsd::MarkovModel> family = hsd::load_family_file(family_path);
    if (emulate_cost_scale > 0.0) {
      for (auto& m : family) m.set_cost_emulation(emulate_cost_scale);
    }
    hsd::Problem problem;
    if (!config_path.empty()) {
      std::vector<hsd::MatrixDiagnostic> warnings;
      problem = hsd::load_problem_file(config_path, &warnings);
      print_warnings(warnings);
    } else {
      problem = hsd::family_problem(family, alpha_contexts, global.seed, 15);
    }
    const auto models = hsd::model_pointers(family);
    report = hsd::simulate(problem, models, plan, config);
  } else if (!config_path.empty()) {
    std::vector<hsd::MatrixDiagnostic> warnings;
    const hsd::Problem problem = hsd::load_problem_file(config_path, &warnings);
    print_warnings(warnings);
    report = hsd::simulate(problem, plan, config);
  } else {
    throw hsd::input_error("simulate needs --config and/or --family");
  }

  emit(global, global.format == "json" ? sim_report_to_json(report).dump(2)
                                       : sim_report_to_text(report));
  return kExitOk;
}

int cmd_estimate_alpha(const GlobalOptions& global, const std::string& family_path,
                       int n_contexts) {
  const std::vector<hsd::MarkovModel> family = hsd::load_family_file(family_path);
  const auto models = hsd::model_pointers(family);
  const hsd::AcceptanceMatrix alpha =
      hsd::estimate_acceptance_matrix(models, n_contexts, global.seed);
  const auto diagnostics = hsd::validate_matrix(alpha);

  if (global.format == "json") {
    json rows = json::array();
    for (int i = 0; i < alpha.size(); ++i) {
      json row = json::array();
      for (int j = 0; j < alpha.size(); ++j) row.push_back(alpha.at(i, j));
      rows.push_back(row);
    }
    json diag = json::array();
    for (const auto& d : diagnostics) diag.push_back(d.describe());
    emit(global, json{{"alpha", rows}, {"diagnostics", diag}}.dump(2));
  } else {
    std::ostringstream out;
    for (int i = 0; i < alpha.size(); ++i) {
      for (int j = 0; j < alpha.size(); ++j) {
        out << std::setw(10) << fmt(alpha.at(i, j), 4);
      }
      out << "\n";
    }
    for (const auto& d : diagnostics) out << d.describe() << "\n";
    if (diagnostics.empty()) out << "triangle check: ok\n";
    emit(global, out.str());
  }
  return kExitOk;
}

int cmd_graph(const GlobalOptions& global, const std::string& config_path,
              const std::string& dot_path) {
  std::vector<hsd::MatrixDiagnostic> warnings;
  const hsd::Problem problem = hsd::load_problem_file(config_path, &warnings);
  print_warnings(warnings);
  const hsd::GspGraph graph = hsd::build_graph(problem);
  const std::string dot = hsd::export_dot(graph);
  if (dot_path.empty() || dot_path == "-") {
    emit(global, dot);
  } else {
    std::ofstream out(dot_path, std::ios::binary);
    if (!out) throw hsd::input_error("cannot open dot output file: " + dot_path);
    out << dot;
    std::cerr << "wrote " << graph.vertices.size() << " vertices, " << graph.edges.size()
              << " edges to " << dot_path << "\n";
  }
  return kExitOk;
}

int cmd_reproduce(const GlobalOptions& global, const std::string& case_name, bool with_sim,
                  long long sim_tokens) {
  hsd::reference::ReproReport report;
  if (case_name == "example1") {
    report = hsd::reference::reproduce_ladder(1, with_sim, global.seed, sim_tokens);
  } else if (case_name == "example2") {
    report = hsd::reference::reproduce_ladder(2, with_sim, global.seed, sim_tokens);
  } else if (case_name == "grid") {
    report = hsd::reference::reproduce_grid();
  } else {
    throw hsd::input_error("--case must be example1, example2 or grid");
  }

  if (global.format == "json") {
    json cells = json::array();
    for (const auto& c : report.cells) {
      json cell{{"id", c.id},
                {"published", c.published},
                {"computed", c.computed},
                {"rel_err", c.rel_err},
                {"within_tolerance", c.within_tolerance}};
      if (c.simulated) cell["simulated"] = *c.simulated;
      if (!c.published_label.empty()) {
        cell["published_label"] = c.published_label;
        cell["computed_label"] = c.computed_label;
      }
      cells.push_back(cell);
    }
    emit(global, json{{"case", report.case_name},
                      {"cells", cells},
                      {"all_within_tolerance", report.all_within_tolerance}}
                     .dump(2));
  } else {
    std::ostringstream out;
    out << "case: " << report.case_name << "\n";
    out << std::left << std::setw(22) << "cell" << std::right << std::setw(11) << "published"
        << std::setw(11) << "computed" << std::setw(10) << "rel_err";
    const bool has_sim =
        !report.cells.empty() && report.cells.back().simulated.has_value();
    const bool has_labels = !report.cells.empty() && !report.cells[0].published_label.empty();
    if (has_sim) out << std::setw(11) << "simulated";
    if (has_labels) out << "  label(pub/computed)";
    out << "  ok\n";
    for (const auto& c : report.cells) {
      out << std::left << std::setw(22) << c.id << std::right << std::setw(11)
          << fmt(c.published, 5) << std::setw(11) << fmt(c.computed, 5) << std::setw(9)
          << fmt(c.rel_err * 100.0, 3) << "%";
      if (has_sim) out << std::setw(11) << (c.simulated ? fmt(*c.simulated, 5) : "-");
      if (has_labels) out << "  " << c.published_label << "/" << c.computed_label;
      out << (c.within_tolerance ? "  pass" : "  FAIL") << "\n";
    }
    out << (report.all_within_tolerance ? "all cells within tolerance"
                                        : "TOLERANCE FAILURES PRESENT")
        << "\n";
    emit(global, out.str());
  }
  return report.all_within_tolerance ? kExitOk : kExitToleranceFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical speculative decoding: latency analysis, hierarchy optimization and simulation"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  app.add_option("--seed", global.seed, "Random seed shared by all subcommands");
  app.add_option("--format", global.format, "Output format: text or json")
      ->check(CLI::IsMember({"text", "json"}));
  app.add_option("--output", global.output, "Write the report to a file instead of stdout");

  // optimize
  std::string opt_config;
  int opt_t_max = 0;
  bool opt_brute = false;
  auto* optimize_cmd = app.add_subcommand("optimize", "Find the latency-optimal hierarchy")->fallthrough();
  optimize_cmd->add_option("--config", opt_config, "Problem config JSON")->required();
  optimize_cmd->add_option("--t-max", opt_t_max, "Override the config's T cap");
  optimize_cmd->add_flag("--brute-force", opt_brute, "Use the exhaustive oracle solver");

  // latency
  std::string lat_config, lat_sigma, lat_t;
  auto* latency_cmd = app.add_subcommand("latency", "Analytical latency of a given hierarchy")->fallthrough();
  latency_cmd->add_option("--config", lat_config, "Problem config JSON")->required();
  latency_cmd->add_option("--sigma", lat_sigma, "Comma-separated model indices, target last")
      ->required();
  latency_cmd->add_option("--t", lat_t, "Comma-separated per-level token quotas")->required();

  // gamma
  double g_alpha = 0.0;
  int g_ti = 1, g_tj = 1;
  long long g_mc = 0;
  auto* gamma_cmd = app.add_subcommand("gamma", "Expected draft/verify rounds for one level")->fallthrough();
  gamma_cmd->add_option("--alpha", g_alpha, "Acceptance rate")->required();
  gamma_cmd->add_option("--ti", g_ti, "Tokens delivered per round")->required();
  gamma_cmd->add_option("--tj", g_tj, "Tokens required")->required();
  gamma_cmd->add_option("--mc", g_mc, "Also Monte-Carlo estimate with this many trials");

  // simulate
  std::string sim_config, sim_family, sim_sigma, sim_t, sim_mode = "iid-coin",
                                                        sim_cost = "configured";
  long long sim_tokens = 100000;
  int sim_trials = 1;
  bool sim_overshoot = false;
  double sim_emulate = 0.0;
  int sim_contexts = 1000;
  auto* simulate_cmd = app.add_subcommand("simulate", "Monte-Carlo latency simulation")->fallthrough();
  simulate_cmd->add_option("--config", sim_config, "Problem config JSON");
  simulate_cmd->add_option("--family", sim_family, "Toy model family spec JSON");
  simulate_cmd->add_option("--sigma", sim_sigma, "Comma-separated model indices")->required();
  simulate_cmd->add_option("--t", sim_t, "Comma-separated token quotas")->required();
  simulate_cmd->add_option("--tokens", sim_tokens, "Tokens per trial");
  simulate_cmd->add_option("--trials", sim_trials, "Independent trials");
  simulate_cmd->add_option("--mode", sim_mode, "Acceptance: iid-coin or model-based");
  simulate_cmd->add_option("--cost-mode", sim_cost, "configured or wallclock");
  simulate_cmd->add_flag("--forward-overshoot", sim_overshoot,
                         "Coin runs forward full buffers instead of exact quotas");
  simulate_cmd->add_option("--emulate-cost", sim_emulate,
                           "Busy-wait seconds per cost unit inside toy model calls");
  simulate_cmd->add_option("--alpha-contexts", sim_contexts,
                           "Contexts for estimating the family acceptance matrix");

  // estimate-alpha
  std::string est_family;
  int est_contexts = 1000;
  auto* estimate_cmd =
      app.add_subcommand("estimate-alpha", "Estimate the pairwise acceptance matrix of a family")->fallthrough();
  estimate_cmd->add_option("--family", est_family, "Toy model family spec JSON")->required();
  estimate_cmd->add_option("--contexts", est_contexts, "Number of sampled contexts");

  // graph
  std::string graph_config, graph_dot;
  auto* graph_cmd = app.add_subcommand("graph", "Export the reduction graph as GraphViz DOT")->fallthrough();
  graph_cmd->add_option("--config", graph_config, "Problem config JSON")->required();
  graph_cmd->add_option("--dot", graph_dot, "Output DOT path ('-' for stdout)");

  // reproduce
  std::string repro_case;
  bool repro_no_sim = false;
  long long repro_tokens = 200000;
  auto* reproduce_cmd =
      app.add_subcommand("reproduce", "Compare against the embedded reference tables")->fallthrough();
  reproduce_cmd->add_option("--case", repro_case, "example1, example2 or grid")->required();
  reproduce_cmd->add_flag("--no-sim", repro_no_sim, "Skip the simulation column");
  reproduce_cmd->add_option("--sim-tokens", repro_tokens, "Tokens for the simulation column");

  CLI11_PARSE(app, argc, argv);

  try {
    if (optimize_cmd->parsed()) return cmd_optimize(global, opt_config, opt_t_max, opt_brute);
    if (latency_cmd->parsed()) return cmd_latency(global, lat_config, lat_sigma, lat_t);
    if (gamma_cmd->parsed()) return cmd_gamma(global, global.seed, g_alpha, g_ti, g_tj, g_mc);
    if (simulate_cmd->parsed()) {
      return cmd_simulate(global, sim_config, sim_family, sim_sigma, sim_t, sim_tokens,
                          sim_trials, sim_mode, sim_cost, sim_overshoot, sim_emulate,
                          sim_contexts);
    }
    if (estimate_cmd->parsed()) return cmd_estimate_alpha(global, est_family, est_contexts);
    if (graph_cmd->parsed()) return cmd_graph(global, graph_config, graph_dot);
    if (reproduce_cmd->parsed()) {
      return cmd_reproduce(global, repro_case, !repro_no_sim, repro_tokens);
    }
  } catch (const hsd::input_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
