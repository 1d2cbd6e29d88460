#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "hsd/categorical.hpp"
#include "hsd/errors.hpp"
#include "hsd/latency.hpp"
#include "hsd/sampling.hpp"
#include "test_util.hpp"

using namespace hsd;

TEST_CASE("residual distribution hand examples") {
  const Categorical r1 =
      residual_distribution(Categorical({0.7, 0.3}), Categorical({0.3, 0.7}));
  CHECK(r1[0] == doctest::Approx(1.0));
  CHECK(r1[1] == doctest::Approx(0.0));

  const Categorical r2 = residual_distribution(Categorical({0.5, 0.25, 0.25}),
                                               Categorical({0.25, 0.5, 0.25}));
  CHECK(r2[0] == doctest::Approx(1.0));
  CHECK(r2[1] == doctest::Approx(0.0));
  CHECK(r2[2] == doctest::Approx(0.0));

  const Categorical p({0.4, 0.6});
  CHECK_THROWS_AS(residual_distribution(p, p), degenerate_residual_error);
}

TEST_CASE("verify accepts everything when draft equals verifier") {
  RandomSource rng(3);
  const Categorical p = test::random_categorical(6, rng);
  for (int t = 1; t <= 4; ++t) {
    DraftBatch batch;
    for (int i = 0; i < t; ++i) {
      batch.tokens.push_back(rng.categorical(p.span()));
      batch.probs.push_back(p);
    }
    std::vector<Categorical> verifier(static_cast<size_t>(t) + 1, p);
    const VerifyOutcome out = verify(batch, verifier, rng);
    CHECK(out.accepted_count == t);
    CHECK_FALSE(out.rejected);
    CHECK(out.output_tokens.size() == static_cast<size_t>(t) + 1);
    CHECK(out.output_probs.size() == static_cast<size_t>(t) + 1);
  }
}

TEST_CASE("verify rejects a zero-probability draft token with certainty") {
  RandomSource rng(5);
  // p puts no mass on token 0; q proposes it
  const Categorical p({0.0, 0.6, 0.4});
  const Categorical q({0.5, 0.25, 0.25});
  for (int it = 0; it < 50; ++it) {
    DraftBatch batch{{0}, {q}};
    const VerifyOutcome out = verify(batch, std::vector<Categorical>{p, p}, rng);
    CHECK(out.accepted_count == 0);
    CHECK(out.rejected);
    REQUIRE(out.output_tokens.size() == 1);
    // corrected token drawn from the positive part of p - q
    CHECK(out.output_tokens[0] != 0);
  }
}

TEST_CASE("verify validates inputs") {
  RandomSource rng(1);
  const Categorical p({0.5, 0.5});
  DraftBatch batch{{0}, {p}};
  CHECK_THROWS_AS(verify(batch, std::vector<Categorical>{p}, rng), input_error);  // need t+1
  DraftBatch zero_q{{0}, {Categorical({0.0, 1.0})}};
  CHECK_THROWS_AS(verify(zero_q, std::vector<Categorical>{p, p}, rng), input_error);
}

TEST_CASE("exact output distribution equals the verifier law") {
  CHECK(exact_output_distribution(Categorical({0.3, 0.7}), Categorical({0.3, 0.7})).probs() ==
        Categorical({0.3, 0.7}).probs());

  const Categorical point = exact_output_distribution(Categorical({1.0, 0.0}),
                                                      Categorical({0.5, 0.5}));
  CHECK(point[0] == doctest::Approx(1.0));

  RandomSource rng(17);
  for (int it = 0; it < 100; ++it) {
    const int vocab = 2 + rng.uniform_int(4);  // vocab <= 5
    const Categorical p = test::random_categorical(vocab, rng);
    const Categorical q = test::random_categorical(vocab, rng);
    const Categorical out = exact_output_distribution(p, q);
    for (int x = 0; x < vocab; ++x) {
      CHECK(std::fabs(out[x] - p[x]) < 1e-12);
    }
  }
}

TEST_CASE("sampled verify marginal matches the exact oracle") {
  // t=1, vocab 3: empirical law of the single output token vs the oracle.
  const Categorical p({0.5, 0.3, 0.2});
  const Categorical q({0.2, 0.5, 0.3});
  const Categorical oracle = exact_output_distribution(p, q);

  RandomSource rng(23);
  const int n = 200000;
  std::vector<long long> counts(3, 0);
  for (int it = 0; it < n; ++it) {
    const int draft = rng.categorical(q.span());
    DraftBatch batch{{draft}, {q}};
    const VerifyOutcome out = verify(batch, std::vector<Categorical>{p, p}, rng);
    ++counts[static_cast<size_t>(out.output_tokens[0])];
  }
  double tv = 0.0;
  for (int x = 0; x < 3; ++x) {
    tv += std::fabs(static_cast<double>(counts[static_cast<size_t>(x)]) / n - oracle[x]);
  }
  CHECK(tv / 2.0 < 0.01);
}

TEST_CASE("acceptance indicator probability equals the analytical rate") {
  RandomSource rng(29);
  for (int it = 0; it < 20; ++it) {
    const int vocab = 2 + rng.uniform_int(4);
    const Categorical p = test::random_categorical(vocab, rng);
    const Categorical q = test::random_categorical(vocab, rng);
    // sum_x q(x) min(1, p(x)/q(x)) = acceptance_rate(p, q)
    double analytic = 0.0;
    for (int x = 0; x < vocab; ++x) {
      if (q[x] > 0.0) analytic += q[x] * std::min(1.0, p[x] / q[x]);
    }
    CHECK(analytic == doctest::Approx(acceptance_rate(p, q)).epsilon(1e-12));

    const int n = 20000;
    int accepted = 0;
    for (int s = 0; s < n; ++s) {
      const int draft = rng.categorical(q.span());
      DraftBatch batch{{draft}, {q}};
      if (!verify(batch, std::vector<Categorical>{p, p}, rng).rejected) ++accepted;
    }
    const double se = std::sqrt(analytic * (1.0 - analytic) / n) + 1e-9;
    CHECK(std::fabs(static_cast<double>(accepted) / n - analytic) < 5.0 * se + 0.005);
  }
}

TEST_CASE("expected output length matches the truncated geometric mean") {
  // Context-free pair with acceptance exactly 0.8; batch of t = 5 drafts.
  const Categorical q({1.0, 0.0});
  const Categorical p({0.8, 0.2});
  REQUIRE(acceptance_rate(p, q) == doctest::Approx(0.8));

  RandomSource rng(31);
  const int t = 5, n = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (int it = 0; it < n; ++it) {
    DraftBatch batch;
    for (int i = 0; i < t; ++i) {
      batch.tokens.push_back(0);  // q is a point mass on 0
      batch.probs.push_back(q);
    }
    std::vector<Categorical> verifier(static_cast<size_t>(t) + 1, p);
    const double len = static_cast<double>(verify(batch, verifier, rng).output_tokens.size());
    sum += len;
    sum_sq += len * len;
  }
  const double mean = sum / n;
  const double expected = expected_round_tokens(0.8, t);  // (1 - 0.8^6) / 0.2
  CHECK(expected == doctest::Approx(3.68928).epsilon(1e-5));
  const double var = sum_sq / n - mean * mean;
  const double se = std::sqrt(var / n);
  CHECK(std::fabs(mean - expected) < 3.0 * se);
}

TEST_CASE("exact enumeration of a two-draft round: every emitted position follows p") {
  // Context-independent p and q; enumerate draft pairs, acceptance branches
  // and the final resample, then check positional marginals.
  const Categorical p({0.5, 0.3, 0.2});
  const Categorical q({0.25, 0.35, 0.4});
  const int vocab = 3;

  // joint[(len, tokens)] -> probability. Tokens encoded base-vocab.
  std::map<std::pair<int, int>, double> joint;
  const Categorical residual = residual_distribution(p, q);
  for (int x1 = 0; x1 < vocab; ++x1) {
    if (q[x1] <= 0) continue;
    const double a1 = std::min(1.0, p[x1] / q[x1]);
    // reject at position 1: output = (m) with m ~ residual
    for (int m = 0; m < vocab; ++m) {
      if (residual[m] > 0) {
        joint[{1, m}] += q[x1] * (1 - a1) * residual[m];
      }
    }
    for (int x2 = 0; x2 < vocab; ++x2) {
      if (q[x2] <= 0) continue;
      const double a2 = std::min(1.0, p[x2] / q[x2]);
      const double base = q[x1] * a1 * q[x2];
      // reject at position 2: output = (x1, m)
      for (int m = 0; m < vocab; ++m) {
        if (residual[m] > 0) joint[{2, x1 * vocab + m}] += base * (1 - a2) * residual[m];
      }
      // accept both: output = (x1, x2, bonus)
      for (int m = 0; m < vocab; ++m) {
        if (p[m] > 0) joint[{3, (x1 * vocab + x2) * vocab + m}] += base * a2 * p[m];
      }
    }
  }

  double total = 0.0;
  for (const auto& [key, prob] : joint) total += prob;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  // First emitted token is unconditionally p-distributed.
  std::vector<double> first(vocab, 0.0);
  for (const auto& [key, prob] : joint) {
    const auto [len, enc] = key;
    int lead = enc;
    for (int d = 1; d < len; ++d) lead /= vocab;
    first[static_cast<size_t>(lead)] += prob;
  }
  for (int x = 0; x < vocab; ++x) CHECK(std::fabs(first[static_cast<size_t>(x)] - p[x]) < 1e-12);

  // Second emitted token, conditioned on at least two tokens, is also p.
  std::vector<double> second(vocab, 0.0);
  double mass2 = 0.0;
  for (const auto& [key, prob] : joint) {
    const auto [len, enc] = key;
    if (len < 2) continue;
    int tok = enc;
    for (int d = 2; d < len; ++d) tok /= vocab;
    second[static_cast<size_t>(tok % vocab)] += prob;
    mass2 += prob;
  }
  for (int x = 0; x < vocab; ++x) {
    CHECK(std::fabs(second[static_cast<size_t>(x)] / mass2 - p[x]) < 1e-12);
  }
}
