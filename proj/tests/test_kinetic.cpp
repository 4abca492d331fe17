#include <catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <random>

#include "nlfkpp/kinetic.hpp"

using namespace nlfkpp;
using Catch::Approx;

namespace {

KineticState random_state(std::size_t n, double eps, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(0.1, 1.0);
  KineticState s{Grid1D(-3, 3, static_cast<int>(n), Periodic{}), {}, {}, eps, 1.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    s.p_plus.push_back(d(rng));
    s.p_minus.push_back(d(rng));
  }
  return s;
}

double total(const KineticState& s) {
  return std::accumulate(s.p_plus.begin(), s.p_plus.end(), 0.0) +
         std::accumulate(s.p_minus.begin(), s.p_minus.end(), 0.0);
}

}  // namespace

TEST_CASE("turning operator conserves density node by node") {
  const KineticState s = random_state(100, 0.1, 1);
  const auto [lp, lm] = turning_operator(s);
  for (std::size_t i = 0; i < lp.size(); ++i) {
    CHECK(lp[i] + lm[i] == 0.0);
    CHECK(lp[i] == Approx(0.5 * (s.p_minus[i] - s.p_plus[i])));
  }
}

TEST_CASE("interaction on the isotropic split reproduces the macroscopic reaction") {
  const ModelParams p{1.7, 0.6, 3.0, 1.4, 1.0};
  const Grid1D g(-3, 3, 64, Periodic{});
  const double u = 0.8;
  const KineticState s = KineticState::isotropic(Field(g, std::vector<double>(64, u)), 0.1, 1.0);
  const auto [ip, im] = interaction_operator(s, p, Kernel::logistic());
  const double reaction = p.mu * std::pow(u, p.alpha) * (1 - p.kappa * std::pow(u, p.beta));
  for (std::size_t i = 0; i < ip.size(); ++i) CHECK(ip[i] + im[i] == Approx(reaction).epsilon(1e-12));
}

TEST_CASE("transport and relaxation conserve mass") {
  KineticState s = random_state(128, 0.2, 2);
  const double m0 = total(s);
  KineticConfig c;
  c.interaction = false;
  c.t_end = 0.5;
  const KineticRun r = kinetic_run(s, ModelParams{}, Kernel::uniform(), c);
  CHECK(total(r.final_state) == Approx(m0).epsilon(1e-13));
  CHECK(r.max_turning_imbalance == 0.0);
  CHECK(r.min_density_component >= 0.0);
}

TEST_CASE("transport at unit Courant number is an exact shift") {
  KineticState s = random_state(50, 0.2, 3);
  const KineticState before = s;
  KineticConfig c;
  c.interaction = false;
  c.relaxation = false;
  KineticStepper stepper(s.grid, ModelParams{}, Kernel::uniform(), c);
  stepper.step(s, stepper.step_size(s));
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(s.p_plus[(i + 1) % 50] == before.p_plus[i]);
    CHECK(s.p_minus[i] == before.p_minus[(i + 1) % 50]);
  }
  CHECK_THROWS_AS(stepper.step(s, 1.01 * stepper.step_size(s)), ConfigError);
}

TEST_CASE("relaxation damps the flux at rate 1 / eps^2") {
  KineticState s = random_state(20, 0.5, 4);
  const KineticState before = s;
  KineticConfig c;
  c.interaction = false;
  c.transport = false;
  c.dt = 0.1;
  c.t_end = 0.1;
  s = kinetic_step(s, ModelParams{}, Kernel::uniform(), c);
  for (std::size_t i = 0; i < 20; ++i) {
    const double j0 = before.p_plus[i] - before.p_minus[i];
    CHECK(s.p_plus[i] - s.p_minus[i] == Approx(j0 * std::exp(-0.1 / 0.25)).epsilon(1e-12));
    CHECK(s.p_plus[i] + s.p_minus[i] == Approx(before.p_plus[i] + before.p_minus[i]).epsilon(1e-14));
  }
}

TEST_CASE("kinetic inputs are validated") {
  CHECK(diffusion_coefficient(2.0, 1) == 4.0);
  CHECK(diffusion_coefficient(2.0, 2) == 2.0);
  KineticState s = random_state(10, 0.1, 5);
  s.eps = 0.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  KineticState d{Grid1D(0, 1, 10, DirichletExtension{1, 0}), std::vector<double>(11, 0.5),
                 std::vector<double>(11, 0.5), 0.1, 1.0, 0.0};
  CHECK_THROWS_AS(d.validate(), ConfigError);
  KineticConfig c;
  c.cfl = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("the density approaches the parabolic solution as eps shrinks") {
  KineticLimitSetup setup;
  setup.t_end = 0.2;
  const auto rows = kinetic_limit_study(ModelParams{}, Kernel::uniform(), {0.2, 0.1}, setup);
  REQUIRE(rows.size() == 2);
  CHECK(std::isnan(rows[0].order));
  CHECK(rows[1].error < rows[0].error);
  CHECK(rows[1].order >= 1.0);
  for (const auto& r : rows) CHECK(r.max_turning_imbalance == 0.0);
}
