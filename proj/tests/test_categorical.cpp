#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hsd/categorical.hpp"
#include "hsd/errors.hpp"
#include "hsd/problem.hpp"
#include "hsd/reference_cases.hpp"
#include "test_util.hpp"

using namespace hsd;

TEST_CASE("categorical construction and normalization") {
  Categorical c({0.5, 0.5});
  CHECK(c.size() == 2);
  CHECK(c[0] == doctest::Approx(0.5));

  // within tolerance: renormalized
  Categorical d({0.5, 0.5 + 5e-10});
  double sum = 0;
  for (int i = 0; i < d.size(); ++i) sum += d[i];
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS(Categorical({0.5, 0.6}), input_error);
  CHECK_THROWS_AS(Categorical({1.2, -0.2}), input_error);
  CHECK_THROWS_AS(Categorical(std::vector<double>{}), input_error);
}

TEST_CASE("acceptance rate examples") {
  RandomSource rng(11);
  const Categorical p = test::random_categorical(8, rng);
  CHECK(acceptance_rate(p, p) == doctest::Approx(1.0));

  CHECK(acceptance_rate(Categorical({1.0, 0.0}), Categorical({0.0, 1.0})) ==
        doctest::Approx(0.0));
  CHECK(acceptance_rate(Categorical({0.5, 0.5}), Categorical({1.0, 0.0})) ==
        doctest::Approx(0.5));

  CHECK_THROWS_AS(acceptance_rate(Categorical({1.0}), Categorical({0.5, 0.5})), input_error);
}

TEST_CASE("acceptance rate properties: symmetry, range, identity, triangle") {
  RandomSource rng(42);
  for (int it = 0; it < 500; ++it) {
    const int vocab = 2 + rng.uniform_int(7);
    const Categorical p = test::random_categorical(vocab, rng);
    const Categorical q = test::random_categorical(vocab, rng);
    const Categorical r = test::random_categorical(vocab, rng);

    const double a_pq = acceptance_rate(p, q);
    CHECK(a_pq == doctest::Approx(acceptance_rate(q, p)).epsilon(1e-14));
    CHECK(a_pq >= 0.0);
    CHECK(a_pq <= 1.0 + 1e-14);
    // triangle: a(p,q) + a(q,r) <= a(p,r) + 1
    CHECK(a_pq + acceptance_rate(q, r) <= acceptance_rate(p, r) + 1.0 + 1e-12);
  }
}

TEST_CASE("acceptance rate equals 1 iff distributions match") {
  RandomSource rng(7);
  for (int it = 0; it < 100; ++it) {
    const Categorical p = test::random_categorical(5, rng);
    Categorical q = test::random_categorical(5, rng);
    if (total_variation(p, q) > 1e-9) CHECK(acceptance_rate(p, q) < 1.0 - 1e-10);
    CHECK(acceptance_rate(p, p) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("validate_matrix on the six-model reference matrix") {
  const Problem p = reference::example1();
  CHECK(validate_matrix(p.alpha).empty());
}

TEST_CASE("validate_matrix accepts the all-ones matrix") {
  AcceptanceMatrix ones(4);
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) ones.set(i, j, 1.0);
  }
  CHECK(validate_matrix(ones).empty());
}

TEST_CASE("validate_matrix flags triangle violations as warnings") {
  AcceptanceMatrix a(4, 0.0);
  a.set(1, 2, 0.9);
  a.set(2, 3, 0.9);
  a.set(1, 3, 0.5);  // 0.9 + 0.9 = 1.8 > 1.5
  const auto diagnostics = validate_matrix(a);
  REQUIRE(!diagnostics.empty());
  bool found = false;
  for (const auto& d : diagnostics) {
    CHECK(d.kind == MatrixDiagnostic::Kind::triangle_warning);
    if (d.i == 1 && d.j == 2 && d.k == 3) found = true;
  }
  CHECK(found);
}

TEST_CASE("validate_matrix flags out-of-range entries as errors") {
  AcceptanceMatrix a(3, 0.0);
  a.set(0, 1, 1.2);
  const auto diagnostics = validate_matrix(a);
  REQUIRE(diagnostics.size() == 1);
  CHECK(diagnostics[0].is_error());
  CHECK(diagnostics[0].i == 0);
  CHECK(diagnostics[0].j == 1);
}

TEST_CASE("load_problem parses the six-model config") {
  const std::string config = R"({
    "models": [
      {"name": "m0", "cost": 0.00001}, {"name": "m1", "cost": 0.003},
      {"name": "m2", "cost": 0.01},    {"name": "m3", "cost": 0.25},
      {"name": "m4", "cost": 4.0},     {"name": "m5", "cost": 33.0}
    ],
    "alpha": [
      [1, 0.75, 0.50, 0.25, 0.00, 0.00],
      [0, 1,    0.75, 0.50, 0.25, 0.05],
      [0, 0,    1,    0.75, 0.50, 0.30],
      [0, 0,    0,    1,    0.75, 0.55],
      [0, 0,    0,    0,    1,    0.80],
      [0, 0,    0,    0,    0,    1]
    ],
    "t_max": 15
  })";
  std::vector<MatrixDiagnostic> warnings;
  const Problem p = load_problem(config, &warnings);
  CHECK(p.models.size() == 6);
  CHECK(p.models[0].cost == doctest::Approx(0.00001));
  CHECK(p.models[5].cost == doctest::Approx(33.0));
  CHECK(p.t_max == 15);
  CHECK(p.alpha.at(4, 5) == doctest::Approx(0.8));
  CHECK(p.alpha.at(5, 4) == doctest::Approx(0.8));  // symmetric completion
  CHECK(warnings.empty());
}

TEST_CASE("load_problem rejects bad configs") {
  CHECK_THROWS_AS(load_problem("not json"), input_error);
  CHECK_THROWS_AS(
      load_problem(R"({"models":[{"cost":1.0}],"alpha":[[1]],"t_max":3})"),
      input_error);  // one model
  CHECK_THROWS_AS(
      load_problem(
          R"({"models":[{"cost":1.0},{"cost":2.0}],"alpha":[[1,1.2],[0,1]],"t_max":3})"),
      input_error);  // alpha out of range
  CHECK_THROWS_AS(
      load_problem(R"({"models":[{"cost":1.0},{"cost":2.0}],"alpha":[[1,0.5],[0,1]],"t_max":0})"),
      input_error);  // t_max < 1
  CHECK_THROWS_AS(
      load_problem(R"({"models":[{"cost":-1.0},{"cost":2.0}],"alpha":[[1,0.5],[0,1]]})"),
      input_error);  // nonpositive cost
}

TEST_CASE("plan validation") {
  HierarchyPlan good{{0, 2, 3}, {2, 5}};
  CHECK_NOTHROW(good.validate(4, 15));

  CHECK_THROWS_AS((HierarchyPlan{{3}, {}}.validate(4, 15)), input_error);       // too short
  CHECK_THROWS_AS((HierarchyPlan{{0, 2}, {1}}.validate(4, 15)), input_error);   // not ending at K
  CHECK_THROWS_AS((HierarchyPlan{{2, 0, 3}, {1, 1}}.validate(4, 15)), input_error);
  CHECK_THROWS_AS((HierarchyPlan{{0, 1, 3}, {2, 1}}.validate(4, 15)), input_error);  // T decreasing
  CHECK_THROWS_AS((HierarchyPlan{{0, 3}, {16}}.validate(4, 15)), input_error);  // T over cap
  CHECK_THROWS_AS((HierarchyPlan{{0, 3}, {0}}.validate(4, 15)), input_error);   // T under 1
}

TEST_CASE("problem restriction keeps costs and rates aligned") {
  const Problem p = reference::example1();
  const Problem sub = p.restricted_to({3, 4, 5});
  CHECK(sub.models.size() == 3);
  CHECK(sub.models[0].cost == doctest::Approx(0.25));
  CHECK(sub.alpha.at(0, 1) == doctest::Approx(0.75));
  CHECK(sub.alpha.at(1, 2) == doctest::Approx(0.8));
  CHECK(sub.alpha.at(0, 2) == doctest::Approx(0.55));
  CHECK_THROWS_AS(p.restricted_to({0, 1}), input_error);  // must end at target
}
