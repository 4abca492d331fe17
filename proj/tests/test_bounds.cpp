#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "nlfkpp/bounds.hpp"
#include "oracles.hpp"

using namespace nlfkpp;
using Catch::Approx;

TEST_CASE("critical exponents") {
  CHECK(critical_alpha(1, 1.0) == 2.0);
  CHECK(critical_alpha(2, 0.5) == 1.5);
  CHECK(critical_alpha(3, 1.0) == Approx(5.0 / 3.0));
  CHECK(critical_alpha(4, 2.0) == 2.0);
  CHECK(std::isinf(critical_s(1)));
  CHECK(std::isinf(critical_s(2)));
  CHECK(critical_s(3) == 6.0);
  CHECK(critical_s(4) == 4.0);
  CHECK_THROWS_AS(critical_alpha(0, 1.0), ConfigError);
}

TEST_CASE("bound constants in one dimension by hand") {
  BoundInputs in;
  in.alpha = 1.5;
  const BoundReport r = bound_M(in);
  const double A = 16.0 * std::sqrt(2.0) / (0.5 * 0.49);
  CHECK(r.A == Approx(A).epsilon(1e-14));
  CHECK(r.exponent == Approx(2.0));
  CHECK(r.M == Approx(2.0 * A * A).epsilon(1e-14));
  CHECK(std::isinf(r.s_star));
  CHECK_FALSE(r.mu_star.has_value());
  CHECK_FALSE(r.mu_star_note.empty());
}

TEST_CASE("bound constants in three dimensions by hand") {
  BoundInputs in;
  in.N = 3;
  in.alpha = 1.2;
  in.delta0 = 2.5;
  in.G = 0.7;
  in.u0_sup = 1e30;
  const BoundReport r = bound_M(in);
  const double base = 4.0 * std::sqrt(2.0) * 2.5 * 0.7;
  const double A = 4.0 * std::pow(base, 1.2) / (std::pow(2.5, 3) * 0.49);
  CHECK(r.s_star == 6.0);
  CHECK(r.A == Approx(A).epsilon(1e-13));
  CHECK(r.exponent == Approx(4.0 / 2.8).epsilon(1e-14));
  CHECK(r.M == Approx(2e30));  // the initial datum dominates
}

TEST_CASE("the N <= 2 limit agrees with large finite exponents") {
  for (int N : {1, 2}) {
    for (double alpha : {1.0, 1.3, 1.9}) {
      BoundInputs in;
      in.N = N;
      in.alpha = alpha;
      in.G = 3.0;
      const BoundReport lim = bound_M(in);
      const BoundReport fin = bound_M_at(in, 1e9);
      CHECK(fin.A == Approx(lim.A).epsilon(1e-5));
      CHECK(fin.exponent == Approx(lim.exponent).epsilon(1e-5));
      CHECK(fin.M == Approx(lim.M).epsilon(1e-4));
    }
  }
}

TEST_CASE("the bound grows without limit as alpha approaches the critical value") {
  BoundInputs in;
  double prev = 0.0;
  for (double alpha : {1.0, 1.5, 1.9, 1.99, 1.999}) {
    in.alpha = alpha;
    const double M = bound_M(in).M;
    CHECK(M > prev);
    prev = M;
  }
  in.alpha = 2.0;
  CHECK_THROWS_AS(bound_M(in), ConfigError);
  in.alpha = 2.5;
  CHECK_THROWS_AS(bound_M(in), ConfigError);
}

TEST_CASE("input validation") {
  BoundInputs in;
  in.K = 1.0;
  CHECK_THROWS_AS(bound_M(in), ConfigError);
  in = BoundInputs{};
  in.alpha = 0.5;
  CHECK_THROWS_AS(bound_M(in), ConfigError);
  in = BoundInputs{};
  in.delta = 0.3;  // more than delta0 / 2
  in.m = 2;
  CHECK_THROWS_AS(bound_M(in), ConfigError);
}

TEST_CASE("mu* follows the anchor m") {
  BoundInputs in;
  in.alpha = 1.5;
  in.m = 3;
  const BoundReport r = bound_M(in);
  REQUIRE(r.mu_star.has_value());
  // N = 1, s = infinity: S = sqrt2 max((2 delta)^(-1/2), (2 delta)^(1/2) G), delta = delta0 / 2
  const double two_delta = 0.5;
  const double S = std::sqrt(2.0) * std::max(std::pow(two_delta, -0.5), std::pow(two_delta, 0.5));
  const double C1 = 2.0 * S * (1.0 + 2.0 * 0.25);
  CHECK(sobolev_C1(1, INFINITY, 0.25, 1.0, 1.0) == Approx(C1));
  const double q = 4.0 + 2.0 * 0.5;
  CHECK(*r.mu_star == Approx(1.0 / (2.0 * C1 * C1 * q * q)));
  in.m = 5;
  CHECK(*bound_M(in).mu_star < *r.mu_star);
}

TEST_CASE("closed-form exponent of 2^D equals the direct sum") {
  for (int m = 1; m <= 6; ++m) {
    for (int k = m; k <= m + 20; ++k) {
      double direct = 0.0;
      for (int i = 0; i <= k - m; ++i) direct += (k - i) * std::exp2(i);
      CHECK(iteration_D_power(k, m) == Approx(direct).epsilon(1e-14));
    }
  }
}

TEST_CASE("two iteration steps expanded by hand") {
  // y_m <= 2 A_m max{S^2, K^(2^m), 1}, y_{m+1} <= 2 A_{m+1} max{1, sup y_m^2}
  // = (2 a)^3 2^(D (m + 1 + 2 m)) max{S^4, K^(2^(m+1)), 1}
  IterationProblem p;
  p.a_bar = 1.7;
  p.D_exp = 0.6;
  p.K_init = 1.3;
  p.y_m_minus_1_sup = 2.5;
  for (int m = 1; m <= 4; ++m) {
    p.m = m;
    const double S4 = std::pow(2.5, 4), Kp = std::pow(1.3, std::exp2(m + 1));
    const double expected = std::pow(2 * 1.7, 3) * std::exp2(0.6 * (3 * m + 1)) * std::max({S4, Kp, 1.0});
    CHECK(iteration_bound(p, m + 1) == Approx(expected).epsilon(1e-12));
  }
  p.a_bar = 0.5;
  CHECK_THROWS_AS(iteration_bound(p, 2), ConfigError);
}

TEST_CASE("iteration bound equals the product form") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> a(1.0, 5.0), d(0.1, 3.0), K(1.01, 3.0), y(0.0, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    IterationProblem p;
    p.a_bar = a(rng);
    p.D_exp = d(rng);
    p.K_init = K(rng);
    p.m = 1 + trial % 4;
    p.y_m_minus_1_sup = y(rng);
    for (int k = p.m; k < p.m + 12; ++k) {
      const double ref = oracle::lemma_bound_log2(p.a_bar, p.D_exp, p.K_init, p.m, p.y_m_minus_1_sup, k);
      CHECK(iteration_bound_log2(p, k) == Approx(ref).epsilon(1e-12));
    }
  }
}

TEST_CASE("the extremal chain stays under the bound") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> c(0.1, 50.0), a(1.0, 4.0), d(0.2, 2.0), K(1.05, 2.0), y(0.0, 4.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 1 + trial % 3, k_max = m + 7;
    std::vector<double> cs(static_cast<std::size_t>(k_max + 1));
    for (double& x : cs) x = c(rng);
    IterationProblem p{cs, a(rng), d(rng), K(rng), m, y(rng)};
    const auto chain = oracle::lemma_chain(cs, p.a_bar, p.D_exp, p.K_init, m, p.y_m_minus_1_sup, k_max);
    for (int k = m; k <= k_max; ++k) {
      const double bound = iteration_bound_log2(p, k);
      for (double t : {0.0, 1e-3, 0.1, 1.0, 10.0, 1e3}) CHECK(chain[k - m].log2_at(t) <= bound + 1e-9);
    }
    const LemmaReport rep = verify_lemma(p, k_max, 5.0);
    CHECK(rep.passed);
    CHECK(rep.worst_ratio <= 1.0);
    CHECK(rep.samples > 0);
  }
}

TEST_CASE("bounds beyond double range report their logarithm") {
  IterationProblem p;
  p.a_bar = 10.0;
  p.K_init = 2.0;
  p.m = 1;
  CHECK(iteration_bound(p, 3) > 1.0);
  try {
    iteration_bound(p, 20);
    FAIL("expected overflow");
  } catch (const BoundOverflow& e) {
    CHECK(e.log2_value() == Approx(iteration_bound_log2(p, 20)));
  }
  CHECK_THROWS_AS(iteration_bound_log2(p, 0), ConfigError);
}
