#include "hsd/problem.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hsd/errors.hpp"

namespace hsd {

AcceptanceMatrix::AcceptanceMatrix(std::vector<std::vector<double>> rows)
    : AcceptanceMatrix(static_cast<int>(rows.size())) {
  for (int i = 0; i < n_; ++i) {
    if (static_cast<int>(rows[static_cast<size_t>(i)].size()) != n_) {
      throw input_error("acceptance matrix: row " + std::to_string(i) + " is not square");
    }
    for (int j = i + 1; j < n_; ++j) {
      set(i, j, rows[static_cast<size_t>(i)][static_cast<size_t>(j)]);
    }
  }
}

std::string MatrixDiagnostic::describe() const {
  std::ostringstream out;
  if (kind == Kind::range_error) {
    out << "alpha[" << i << "][" << j << "] = " << lhs << " outside [0, 1]";
  } else {
    out << "triangle violated at (" << i << ", " << j << ", " << k << "): alpha_ij + alpha_jk = "
        << lhs << " > alpha_ik + 1 = " << rhs;
  }
  return out.str();
}

std::vector<MatrixDiagnostic> validate_matrix(const AcceptanceMatrix& alpha) {
  std::vector<MatrixDiagnostic> out;
  const int n = alpha.size();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double a = alpha.at(i, j);
      if (!(a >= 0.0 && a <= 1.0) || !std::isfinite(a)) {
        out.push_back({MatrixDiagnostic::Kind::range_error, i, j, 0, a, 0.0});
      }
    }
  }
  if (!out.empty()) return out;  // range errors make triangle checks meaningless
  // alpha_ij + alpha_jk <= alpha_ik + 1; symmetric under swapping i and k,
  // so i < k covers every distinct triple once.
  constexpr double kSlack = 1e-12;
  for (int i = 0; i < n; ++i) {
    for (int k = i + 1; k < n; ++k) {
      for (int j = 0; j < n; ++j) {
        if (j == i || j == k) continue;
        const double lhs = alpha.at(i, j) + alpha.at(j, k);
        const double rhs = alpha.at(i, k) + 1.0;
        if (lhs > rhs + kSlack) {
          out.push_back({MatrixDiagnostic::Kind::triangle_warning, i, j, k, lhs, rhs});
        }
      }
    }
  }
  return out;
}

void Problem::validate() const {
  if (models.size() < 2) throw input_error("problem: need at least 2 models");
  for (size_t i = 0; i < models.size(); ++i) {
    if (!(models[i].cost > 0.0) || !std::isfinite(models[i].cost)) {
      throw input_error("problem: model " + std::to_string(i) + " cost must be positive");
    }
  }
  if (t_max < 1) throw input_error("problem: t_max must be >= 1");
  if (alpha.size() != static_cast<int>(models.size())) {
    throw input_error("problem: alpha matrix size does not match model count");
  }
  for (const auto& d : validate_matrix(alpha)) {
    if (d.is_error()) throw input_error("problem: " + d.describe());
  }
}

Problem Problem::restricted_to(const std::vector<int>& kept) const {
  if (kept.empty() || kept.back() != target_index()) {
    throw input_error("restricted_to: subset must end at the target index");
  }
  Problem sub;
  sub.t_max = t_max;
  sub.vocab_size = vocab_size;
  sub.alpha = AcceptanceMatrix(static_cast<int>(kept.size()));
  for (size_t a = 0; a < kept.size(); ++a) {
    ModelSpec m = models[static_cast<size_t>(kept[a])];
    m.id = static_cast<int>(a);
    sub.models.push_back(std::move(m));
    for (size_t b = a + 1; b < kept.size(); ++b) {
      sub.alpha.set(static_cast<int>(a), static_cast<int>(b), alpha.at(kept[a], kept[b]));
    }
  }
  return sub;
}

void HierarchyPlan::validate(int n_models, int t_max) const {
  if (sigma.size() < 2) throw input_error("plan: sigma must contain at least 2 models");
  if (t_params.size() != sigma.size() - 1) {
    throw input_error("plan: need exactly |sigma|-1 T parameters");
  }
  if (sigma.back() != n_models - 1) throw input_error("plan: sigma must end at the target");
  for (size_t n = 0; n < sigma.size(); ++n) {
    if (sigma[n] < 0 || sigma[n] >= n_models) {
      throw input_error("plan: model index " + std::to_string(sigma[n]) + " out of range");
    }
    if (n > 0 && sigma[n] <= sigma[n - 1]) {
      throw input_error("plan: sigma must be strictly increasing");
    }
  }
  for (size_t n = 0; n < t_params.size(); ++n) {
    if (t_params[n] < 1 || t_params[n] > t_max) {
      throw input_error("plan: T_" + std::to_string(n) + " = " + std::to_string(t_params[n]) +
                        " outside [1, " + std::to_string(t_max) + "]");
    }
    if (n > 0 && t_params[n] < t_params[n - 1]) {
      throw input_error("plan: T parameters must be nondecreasing");
    }
  }
}

Problem load_problem(const std::string& json_text, std::vector<MatrixDiagnostic>* warnings) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw input_error(std::string("problem config: parse error: ") + e.what());
  }

  Problem problem;
  try {
    if (!doc.contains("models") || !doc["models"].is_array()) {
      throw input_error("problem config: missing \"models\" array");
    }
    int id = 0;
    for (const auto& m : doc["models"]) {
      ModelSpec spec;
      spec.id = id++;
      spec.name = m.value("name", "model" + std::to_string(spec.id));
      if (!m.contains("cost")) throw input_error("problem config: model missing \"cost\"");
      spec.cost = m["cost"].get<double>();
      problem.models.push_back(std::move(spec));
    }
    if (!doc.contains("alpha") || !doc["alpha"].is_array()) {
      throw input_error("problem config: missing \"alpha\" matrix");
    }
    std::vector<std::vector<double>> rows;
    for (const auto& r : doc["alpha"]) rows.push_back(r.get<std::vector<double>>());
    if (rows.size() != problem.models.size()) {
      throw input_error("problem config: alpha must be square with one row per model");
    }
    problem.alpha = AcceptanceMatrix(std::move(rows));
    problem.t_max = doc.value("t_max", 15);
    if (doc.contains("vocab_size")) problem.vocab_size = doc["vocab_size"].get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw input_error(std::string("problem config: schema error: ") + e.what());
  }

  problem.validate();
  if (warnings) {
    for (auto& d : validate_matrix(problem.alpha)) {
      if (!d.is_error()) warnings->push_back(d);
    }
  }
  return problem;
}

Problem load_problem_file(const std::string& path, std::vector<MatrixDiagnostic>* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open problem config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_problem(buf.str(), warnings);
}

}  // namespace hsd
