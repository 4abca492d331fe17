#include "nlfkpp/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlfkpp/kernels.hpp"
#include "nlfkpp/solver.hpp"

namespace nlfkpp {

KineticState KineticState::isotropic(const Field& u0, double eps, double speed) {
  KineticState s{u0.grid(), {}, {}, eps, speed, u0.time()};
  s.p_plus.resize(u0.size());
  s.p_minus.resize(u0.size());
  for (std::size_t i = 0; i < u0.size(); ++i) s.p_plus[i] = s.p_minus[i] = 0.5 * u0[i];
  s.validate();
  return s;
}

void KineticState::validate() const {
  if (!grid.periodic()) throw ConfigError("the kinetic model is implemented on periodic grids only");
  if (p_plus.size() != grid.node_count() || p_minus.size() != grid.node_count())
    throw ConfigError("kinetic densities must have one value per grid node");
  if (!(eps > 0.0)) throw ConfigError("eps must be > 0");
  if (!(speed > 0.0)) throw ConfigError("speed must be > 0");
  for (std::size_t i = 0; i < p_plus.size(); ++i)
    if (!(p_plus[i] + p_minus[i] >= 0.0)) throw ConfigError("macroscopic density must be nonnegative");
}

std::vector<double> KineticState::density() const {
  std::vector<double> u(p_plus.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = p_plus[i] + p_minus[i];
  return u;
}

void KineticConfig::validate() const {
  if (!(dt >= 0.0)) throw ConfigError("kinetic dt must be >= 0");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("kinetic cfl must be in (0, 1]");
  if (!(t_end > 0.0)) throw ConfigError("kinetic t_end must be > 0");
}

std::pair<std::vector<double>, std::vector<double>> turning_operator(const KineticState& state) {
  const std::size_t n = state.p_plus.size();
  std::vector<double> lp(n), lm(n);
  for (std::size_t i = 0; i < n; ++i) {
    lp[i] = 0.5 * (state.p_minus[i] - state.p_plus[i]);
    lm[i] = 0.5 * (state.p_plus[i] - state.p_minus[i]);
  }
  return {lp, lm};
}

namespace {

// I for one velocity component, given J * p^beta already in conv.
void interaction_component(std::span<const double> p, std::span<const double> conv, const ModelParams& params,
                           std::span<double> out) {
  const double a = std::exp2(params.alpha - 1.0);                 // 1 / int M^alpha
  const double b = std::exp2(params.alpha + params.beta - 1.0);   // 1 / int M^(alpha+beta)
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pa = p[i] > 0.0 ? std::pow(p[i], params.alpha) : 0.0;
    out[i] = params.mu * (pa * a - params.kappa * pa * conv[i] * b);
  }
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> interaction_operator(const KineticState& state,
                                                                         const ModelParams& params,
                                                                         const Kernel& kernel) {
  state.validate();
  Convolver conv(kernel, state.grid, ConvolutionMethod::FFT);
  const std::size_t n = state.p_plus.size();
  std::vector<double> pw(n), c(n), ip(n), im(n);
  kernels::clamped_power(state.p_plus, params.beta, pw);
  conv.apply(pw, 0.0, 0.0, c);
  interaction_component(state.p_plus, c, params, ip);
  kernels::clamped_power(state.p_minus, params.beta, pw);
  conv.apply(pw, 0.0, 0.0, c);
  interaction_component(state.p_minus, c, params, im);
  return {ip, im};
}

KineticStepper::KineticStepper(const Grid1D& grid, const ModelParams& params, const Kernel& kernel,
                               const KineticConfig& config)
    : grid_(grid), params_(params), config_(config), conv_(kernel, grid, config.convolution_method) {
  if (!grid_.periodic()) throw ConfigError("the kinetic model is implemented on periodic grids only");
  params_.validate();
  config_.validate();
  pow_.resize(grid_.node_count());
  conv_out_.resize(grid_.node_count());
}

double KineticStepper::step_size(const KineticState& state) const {
  const double limit = config_.cfl * state.eps * grid_.spacing() / state.speed;
  return config_.dt > 0.0 ? config_.dt : limit;
}

// Exact solution of the two-speed relaxation: the sum is conserved and the
// difference decays like exp(-tau / eps^2).
void KineticStepper::relax(KineticState& s, double tau) const {
  const double decay = std::exp(-tau / (s.eps * s.eps));
  for (std::size_t i = 0; i < s.p_plus.size(); ++i) {
    const double u = s.p_plus[i] + s.p_minus[i];
    const double w = (s.p_plus[i] - s.p_minus[i]) * decay;
    s.p_plus[i] = 0.5 * (u + w);
    s.p_minus[i] = 0.5 * (u - w);
  }
}

// First-order upwind; at Courant number 1 this is an exact one-cell shift.
void KineticStepper::transport(KineticState& s, double courant) const {
  if (courant == 1.0) {
    std::rotate(s.p_plus.rbegin(), s.p_plus.rbegin() + 1, s.p_plus.rend());
    std::rotate(s.p_minus.begin(), s.p_minus.begin() + 1, s.p_minus.end());
    return;
  }
  const std::size_t n = s.p_plus.size();
  std::vector<double> p = s.p_plus, m = s.p_minus;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t left = i == 0 ? n - 1 : i - 1;
    const std::size_t right = i == n - 1 ? 0 : i + 1;
    s.p_plus[i] = p[i] - courant * (p[i] - p[left]);
    s.p_minus[i] = m[i] - courant * (m[i] - m[right]);
  }
}

void KineticStepper::interact(KineticState& s, double dt) {
  const std::size_t n = s.p_plus.size();
  std::vector<double> ip(n), im(n);
  kernels::clamped_power(s.p_plus, params_.beta, pow_);
  conv_.apply(pow_, 0.0, 0.0, conv_out_);
  interaction_component(s.p_plus, conv_out_, params_, ip);
  kernels::clamped_power(s.p_minus, params_.beta, pow_);
  conv_.apply(pow_, 0.0, 0.0, conv_out_);
  interaction_component(s.p_minus, conv_out_, params_, im);
  for (std::size_t i = 0; i < n; ++i) {
    s.p_plus[i] += dt * ip[i];
    s.p_minus[i] += dt * im[i];
  }
}

void KineticStepper::step(KineticState& s, double dt) {
  if (s.p_plus.size() != grid_.node_count()) throw ConfigError("kinetic state does not match the stepper grid");
  const double limit = config_.cfl * s.eps * grid_.spacing() / s.speed;
  if (!(dt > 0.0) || dt > limit * (1.0 + 1e-12))
    throw ConfigError("kinetic dt violates the transport CFL bound dt <= cfl * eps * h / s");

  if (config_.relaxation) {
    const auto [lp, lm] = turning_operator(s);
    for (std::size_t i = 0; i < lp.size(); ++i)
      max_turning_imbalance_ = std::max(max_turning_imbalance_, std::abs(lp[i] + lm[i]));
    relax(s, 0.5 * dt);
  }
  if (config_.transport) {
    // Snap to an exact shift when dt is the CFL-1 step up to rounding.
    double courant = dt * s.speed / (s.eps * grid_.spacing());
    if (std::abs(courant - 1.0) <= 1e-12) courant = 1.0;
    transport(s, courant);
  }
  if (config_.relaxation) relax(s, 0.5 * dt);
  if (config_.interaction) interact(s, dt);
  s.time += dt;
  for (std::size_t i = 0; i < s.p_plus.size(); ++i)
    min_component_ = std::min({min_component_, s.p_plus[i], s.p_minus[i]});
}

KineticState kinetic_step(const KineticState& state, const ModelParams& params, const Kernel& kernel,
                          const KineticConfig& config) {
  state.validate();
  KineticStepper stepper(state.grid, params, kernel, config);
  KineticState next = state;
  stepper.step(next, stepper.step_size(state));
  return next;
}

KineticRun kinetic_run(const KineticState& initial, const ModelParams& params, const Kernel& kernel,
                       const KineticConfig& config, int density_stride) {
  initial.validate();
  KineticStepper stepper(initial.grid, params, kernel, config);
  KineticRun run{initial, {}, 0, 0.0, 0.0};
  KineticState& s = run.final_state;
  const double dt = stepper.step_size(s);
  const double t_end = initial.time + config.t_end;
  if (density_stride > 0) run.densities.emplace_back(s.time, s.density());
  while (s.time < t_end * (1.0 - 1e-14)) {
    const double h = std::min(dt, t_end - s.time);
    stepper.step(s, h);
    ++run.steps;
    if (density_stride > 0 && run.steps % static_cast<std::size_t>(density_stride) == 0)
      run.densities.emplace_back(s.time, s.density());
  }
  run.max_turning_imbalance = stepper.max_turning_imbalance();
  run.min_density_component = stepper.min_density_component();
  return run;
}

double diffusion_coefficient(double speed, int N) {
  if (!(speed > 0.0)) throw ConfigError("speed must be > 0");
  if (N < 1) throw ConfigError("dimension N must be >= 1");
  return speed * speed / N;
}

std::vector<KineticLimitRow> kinetic_limit_study(const ModelParams& params, const Kernel& kernel,
                                                 const std::vector<double>& eps_values,
                                                 const KineticLimitSetup& setup) {
  std::vector<KineticLimitRow> rows;
  const double length = setup.x_right - setup.x_left;
  for (double eps : eps_values) {
    if (!(eps > 0.0)) throw ConfigError("eps values must be > 0");
    const int n_cells = static_cast<int>(std::lround(length / (setup.cell_factor * eps * eps)));
    const Grid1D grid(setup.x_left, setup.x_right, n_cells, Periodic{});
    std::vector<double> u0(grid.node_count());
    for (std::size_t i = 0; i < u0.size(); ++i) u0[i] = setup.initial(grid.x(i));
    const Field initial(grid, u0, 0.0);

    KineticConfig kc;
    kc.t_end = setup.t_end;
    const KineticRun kin = kinetic_run(KineticState::isotropic(initial, eps, setup.speed), params, kernel, kc);

    ModelParams pp = params;
    pp.diffusion = diffusion_coefficient(setup.speed, 1);
    SolverConfig sc;
    sc.integrator = Integrator::IMEX;
    sc.dt_initial = setup.reference_dt;
    sc.dt_min = setup.reference_dt * 1e-6;
    sc.t_end = kin.final_state.time;
    sc.snapshot_stride = 0;
    const RunOutcome ref = run(initial, pp, kernel, sc);

    KineticLimitRow row;
    row.eps = eps;
    row.n_cells = n_cells;
    const std::vector<double> u = kin.final_state.density();
    const Field& r = ref.final_field();
    for (std::size_t i = 0; i < u.size(); ++i) row.error = std::max(row.error, std::abs(u[i] - r[i]));
    row.order = rows.empty() ? std::numeric_limits<double>::quiet_NaN()
                             : std::log(rows.back().error / row.error) / std::log(rows.back().eps / eps);
    row.max_turning_imbalance = kin.max_turning_imbalance;
    row.min_density_component = kin.min_density_component;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace nlfkpp
