#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hsd/errors.hpp"
#include "hsd/latency.hpp"
#include "hsd/reference_cases.hpp"
#include "test_util.hpp"

using namespace hsd;

namespace {

Problem two_model_problem(double c_draft, double c_target, double alpha, int t_max = 15) {
  Problem p;
  p.t_max = t_max;
  p.models = {{0, "draft", c_draft}, {1, "target", c_target}};
  p.alpha = AcceptanceMatrix(2);
  p.alpha.set(0, 1, alpha);
  return p;
}

}  // namespace

TEST_CASE("round token distribution corners and moments") {
  const auto p0 = round_token_distribution(0.0, 4);
  CHECK(p0[0] == doctest::Approx(1.0));
  for (size_t i = 1; i < p0.size(); ++i) CHECK(p0[i] == doctest::Approx(0.0));

  const auto p1 = round_token_distribution(1.0, 4);
  CHECK(p1.back() == doctest::Approx(1.0));

  const auto p = round_token_distribution(0.2, 1);
  REQUIRE(p.size() == 2);
  CHECK(p[0] == doctest::Approx(0.8));
  CHECK(p[1] == doctest::Approx(0.2));
  const double mean = 1.0 * p[0] + 2.0 * p[1];
  CHECK(mean == doctest::Approx(1.2));
  CHECK(mean == doctest::Approx(expected_round_tokens(0.2, 1)));

  // normalization for arbitrary alpha / t
  RandomSource rng(9);
  for (int it = 0; it < 50; ++it) {
    const double a = rng.uniform01();
    const int t = 1 + rng.uniform_int(10);
    double sum = 0.0;
    for (double v : round_token_distribution(a, t)) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("gamma closed-form corners") {
  for (int ti = 1; ti <= 5; ++ti) {
    for (int tj = 1; tj <= 9; ++tj) {
      CHECK(gamma_rounds(0.0, ti, tj) == doctest::Approx(static_cast<double>(tj)));
      const double ceil_expected = std::ceil(static_cast<double>(tj) / (ti + 1));
      CHECK(gamma_rounds(1.0, ti, tj) == doctest::Approx(ceil_expected));
    }
  }
  CHECK(gamma_rounds(0.5, 1, 2) == doctest::Approx(1.5));
  CHECK(gamma_rounds(0.2, 1, 2) == doctest::Approx(1.8));
}

TEST_CASE("gamma bounds and monotonicity") {
  RandomSource rng(13);
  for (int it = 0; it < 200; ++it) {
    const double a = rng.uniform01();
    const int ti = 1 + rng.uniform_int(6);
    const int tj = 1 + rng.uniform_int(10);
    const double g = gamma_rounds(a, ti, tj);
    CHECK(g >= 1.0 - 1e-12);
    CHECK(g <= static_cast<double>(tj) + 1e-12);
    // nonincreasing in alpha
    CHECK(gamma_rounds(std::min(1.0, a + 0.1), ti, tj) <= g + 1e-12);
    // nonincreasing in t_i
    CHECK(gamma_rounds(a, ti + 1, tj) <= g + 1e-12);
    // nondecreasing in t_j
    CHECK(gamma_rounds(a, ti, tj + 1) >= g - 1e-12);
  }
}

TEST_CASE("gamma matches its Monte Carlo estimate") {
  RandomSource rng(101);
  for (int it = 0; it < 8; ++it) {
    const double a = rng.uniform01();
    const int ti = 1 + rng.uniform_int(5);
    const int tj = 1 + rng.uniform_int(8);
    RandomSource mc_rng = RandomSource::stream(2024, static_cast<uint64_t>(it));
    const MonteCarloEstimate est = mc_gamma_rounds(a, ti, tj, 1000000, mc_rng);
    const double exact = gamma_rounds(a, ti, tj);
    CHECK(std::fabs(est.mean - exact) <= 3.0 * est.std_error + 1e-9);
  }
}

TEST_CASE("top rate values and limit") {
  CHECK(top_rate(0.0, 5) == doctest::Approx(1.0));
  CHECK(top_rate(1.0, 5) == doctest::Approx(1.0 / 6.0));
  CHECK(top_rate(1.0 - 1e-15, 3) == doctest::Approx(0.25));
  CHECK(top_rate(0.8, 5) == doctest::Approx(0.2 / (1.0 - std::pow(0.8, 6))));
  CHECK(1.0 / top_rate(0.8, 5) == doctest::Approx(3.68928).epsilon(1e-5));
}

TEST_CASE("gamma memo table returns identical values") {
  GammaTable table;
  const double v1 = table.get(0.37, 2, 7);
  const double v2 = table.get(0.37, 2, 7);
  CHECK(v1 == v2);
  CHECK(v1 == doctest::Approx(gamma_rounds(0.37, 2, 7)));
  CHECK(table.size() == 1);
  table.get(0.37, 2, 8);
  CHECK(table.size() == 2);
}

TEST_CASE("two-model expected latency matches the closed form") {
  const Problem p = two_model_problem(4.0, 33.0, 0.8);
  const LatencyReport report = expected_latency(p, {{0, 1}, {5}});
  CHECK(report.latency_per_token ==
        doctest::Approx((4.0 * 5 + 33.0) * 0.2 / (1.0 - std::pow(0.8, 6))).epsilon(1e-14));
  CHECK(report.latency_per_token == doctest::Approx(14.36595).epsilon(1e-5));
  CHECK(report.speedup == doctest::Approx(33.0 / report.latency_per_token).epsilon(1e-14));
  REQUIRE(report.level_factors.size() == 2);
  CHECK(report.level_factors[0] == doctest::Approx(5.0));
  CHECK(report.level_factors[1] == doctest::Approx(top_rate(0.8, 5)));

  RandomSource rng(55);
  for (int it = 0; it < 50; ++it) {
    const double cd = 0.1 + rng.uniform01() * 10.0;
    const double ct = cd * (1.5 + rng.uniform01() * 20.0);
    const double a = rng.uniform01();
    const int t = 1 + rng.uniform_int(10);
    const Problem q = two_model_problem(cd, ct, a);
    const double expect = (cd * t + ct) * top_rate(a, t);
    CHECK(expected_latency(q, {{0, 1}, {t}}).latency_per_token ==
          doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("three-model latency: 1024/256/1 cell") {
  Problem p;
  p.t_max = 15;
  p.models = {{0, "C", 1.0}, {1, "B", 256.0}, {2, "A", 1024.0}};
  p.alpha = AcceptanceMatrix(3);
  p.alpha.set(0, 1, 0.2);
  p.alpha.set(0, 2, 0.0);
  p.alpha.set(1, 2, 0.5);

  // two-level B/A with T = 1
  const LatencyReport ab = expected_latency(p, {{1, 2}, {1}});
  CHECK(ab.latency_per_token == doctest::Approx((256.0 + 1024.0) * 0.5 / 0.75).epsilon(1e-12));
  CHECK(ab.latency_per_token == doctest::Approx(853.3333).epsilon(1e-6));
  CHECK(ab.speedup == doctest::Approx(1.20).epsilon(1e-3));

  // full chain with T = (1, 2): gamma(0.2, 1, 2) = 1.8
  const LatencyReport abc = expected_latency(p, {{0, 1, 2}, {1, 2}});
  const double expect = (0.5 / 0.875) * (1024.0 + 1.8 * (256.0 + 1.0));
  CHECK(abc.latency_per_token == doctest::Approx(expect).epsilon(1e-12));
  CHECK(abc.latency_per_token == doctest::Approx(849.4857).epsilon(1e-6));
  CHECK(abc.speedup == doctest::Approx(1.2054).epsilon(1e-4));
}

TEST_CASE("latency scale invariance") {
  RandomSource rng(77);
  for (int it = 0; it < 30; ++it) {
    Problem p = test::random_problem(rng, 2 + rng.uniform_int(3), 6);
    HierarchyPlan plan;
    for (int i = 0; i < static_cast<int>(p.models.size()); ++i) plan.sigma.push_back(i);
    int t = 1 + rng.uniform_int(3);
    for (size_t i = 0; i + 1 < p.models.size(); ++i) {
      plan.t_params.push_back(t);
      t += rng.uniform_int(2);
    }
    const double base = expected_latency(p, plan).latency_per_token;
    const double lambda = 0.25 + 8.0 * rng.uniform01();
    Problem scaled = p;
    for (auto& m : scaled.models) m.cost *= lambda;
    const LatencyReport rep = expected_latency(scaled, plan);
    CHECK(rep.latency_per_token == doctest::Approx(lambda * base).epsilon(1e-10));
    CHECK(rep.speedup ==
          doctest::Approx(expected_latency(p, plan).speedup).epsilon(1e-10));
  }
}

TEST_CASE("latency includes the target's share") {
  RandomSource rng(88);
  for (int it = 0; it < 30; ++it) {
    Problem p = test::random_problem(rng, 2 + rng.uniform_int(4), 5);
    HierarchyPlan plan;
    for (int i = 0; i < static_cast<int>(p.models.size()); ++i) plan.sigma.push_back(i);
    plan.t_params.assign(p.models.size() - 1, 1 + rng.uniform_int(4));
    const LatencyReport rep = expected_latency(p, plan);
    const double a_top = p.alpha.at(plan.sigma[plan.sigma.size() - 2], plan.sigma.back());
    CHECK(rep.latency_per_token >=
          top_rate(a_top, plan.t_params.back()) * p.target_cost() - 1e-12);
    CHECK(rep.latency_per_token > 0.0);
  }
}

TEST_CASE("expected latency validates its inputs") {
  const Problem p = reference::example1();
  CHECK_THROWS_AS(expected_latency(p, {{5}, {}}), input_error);
  CHECK_THROWS_AS(expected_latency(p, {{0, 1, 2}, {2, 1}}), input_error);
  CHECK_THROWS_AS(expected_latency(p, {{0, 9}, {3}}), input_error);
}
