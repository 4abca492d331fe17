#include "nlfkpp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlfkpp/kernels.hpp"

namespace nlfkpp {

namespace {

constexpr double kNegativeTolerance = 1e-10;
constexpr int kQuietStepsBeforeGrowth = 50;
// Central weight at or below this means the kernel spans at least ~10 cells;
// only then is the grid-scale ceiling far above any physical level.
constexpr double kResolvedCentralWeight = 0.1;
constexpr double kSpikeRatio = 2.0;

double power_or_zero(double u, double p) { return u > 0.0 ? std::pow(u, p) : 0.0; }

std::size_t argmax_abs(std::span<const double> u) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < u.size(); ++i)
    if (std::abs(u[i]) > std::abs(u[best])) best = i;
  return best;
}

}  // namespace

std::string to_string(Integrator integrator) { return integrator == Integrator::RK4 ? "rk4" : "imex"; }

Integrator integrator_from_string(const std::string& name) {
  if (name == "rk4") return Integrator::RK4;
  if (name == "imex") return Integrator::IMEX;
  throw ConfigError("unknown integrator '" + name + "' (expected rk4 or imex)");
}

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::CompletedBounded: return "completed_bounded";
    case RunStatus::BlowUpDetected: return "blow_up_detected";
    case RunStatus::DtUnderflow: return "dt_underflow";
  }
  return "unknown";
}

std::string to_string(BlowUpReason reason) {
  switch (reason) {
    case BlowUpReason::None: return "none";
    case BlowUpReason::Threshold: return "threshold";
    case BlowUpReason::NonFinite: return "non_finite";
    case BlowUpReason::GridSaturation: return "grid_saturation";
    case BlowUpReason::DtUnderflow: return "dt_underflow";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("invalid solver config: " + what); };
  if (!(dt_initial > 0.0)) fail("dt_initial must be > 0");
  if (!(dt_min > 0.0) || dt_min > dt_initial) fail("dt_min must be in (0, dt_initial]");
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) fail("cfl_safety must be in (0, 1]");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) fail("t_end must be finite and > 0");
  if (!(blowup_threshold > 0.0)) fail("blowup_threshold must be > 0");
  if (snapshot_stride < 0) fail("snapshot_stride must be >= 0");
  if (!(saturation_fraction >= 0.0 && saturation_fraction <= 1.0)) fail("saturation_fraction must be in [0, 1]");
  for (double t : output_times)
    if (!std::isfinite(t) || t < 0.0) fail("output_times must be finite and >= 0");
}

Solver::Solver(const Grid1D& grid, const ModelParams& params, const Kernel& kernel, const SolverConfig& config)
    : grid_(grid), params_(params), config_(config), conv_(kernel, grid, config.convolution_method) {
  // mu = 0 is accepted here so pure diffusion can be run through the same code.
  ModelParams check = params;
  if (check.mu == 0.0) check.mu = 1.0;
  check.validate();
  config_.validate();
  if (!grid_.periodic()) {
    ext_left_beta_ = power_or_zero(grid_.extension().left_value, params_.beta);
    ext_right_beta_ = power_or_zero(grid_.extension().right_value, params_.beta);
  }
  if (config_.integrator == Integrator::IMEX && grid_.periodic() && grid_.node_count() < 3)
    throw ConfigError("implicit diffusion on a periodic grid needs at least 3 nodes");
  const std::size_t n = grid_.node_count();
  for (auto* v : {&pow_, &conv_out_, &k1_, &k2_, &k3_, &k4_, &tmp_, &stage_, &diag_, &rhs_buf_}) v->resize(n);
}

double Solver::max_stable_dt() const {
  if (config_.integrator == Integrator::IMEX || params_.diffusion == 0.0) return std::numeric_limits<double>::infinity();
  const double h = grid_.spacing();
  return config_.cfl_safety * h * h / (2.0 * params_.diffusion);
}

double Solver::ghost_left() const { return grid_.periodic() ? 0.0 : grid_.extension().left_value; }
double Solver::ghost_right() const { return grid_.periodic() ? 0.0 : grid_.extension().right_value; }

// The end nodes of a Dirichlet grid belong to the exterior, where u is
// prescribed, so they carry the extension values and never evolve.
void Solver::pin_ends(std::span<double> u) const {
  if (grid_.periodic() || u.empty()) return;
  u.front() = grid_.extension().left_value;
  u.back() = grid_.extension().right_value;
}

void Solver::zero_ends(std::span<double> out) const {
  if (grid_.periodic() || out.empty()) return;
  out.front() = 0.0;
  out.back() = 0.0;
}

void Solver::reaction(std::span<const double> u, std::span<double> out) {
  kernels::clamped_power(u, params_.beta, pow_);
  conv_.apply(pow_, ext_left_beta_, ext_right_beta_, conv_out_);
  std::fill(out.begin(), out.end(), 0.0);
  if (params_.mu != 0.0) kernels::add_reaction(u, conv_out_, params_.alpha, params_.mu, params_.kappa, out);
  zero_ends(out);
}

void Solver::rhs(std::span<const double> u, std::span<double> out) {
  kernels::clamped_power(u, params_.beta, pow_);
  conv_.apply(pow_, ext_left_beta_, ext_right_beta_, conv_out_);
  if (params_.diffusion != 0.0)
    kernels::laplacian(u, grid_.spacing(), params_.diffusion, grid_.periodic(), ghost_left(), ghost_right(), out);
  else
    std::fill(out.begin(), out.end(), 0.0);
  if (params_.mu != 0.0) kernels::add_reaction(u, conv_out_, params_.alpha, params_.mu, params_.kappa, out);
  zero_ends(out);
}

void Solver::rk4(std::vector<double>& u, double dt, bool with_diffusion) {
  const std::size_t n = u.size();
  auto f = [&](std::span<const double> x, std::span<double> out) {
    if (with_diffusion)
      rhs(x, out);
    else
      reaction(x, out);
  };
  f(u, k1_);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = u[i] + 0.5 * dt * k1_[i];
  f(tmp_, k2_);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = u[i] + 0.5 * dt * k2_[i];
  f(tmp_, k3_);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = u[i] + dt * k3_[i];
  f(tmp_, k4_);
  for (std::size_t i = 0; i < n; ++i) u[i] += dt / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
}

// Solves (I - r L) out = rhs, L the unscaled second-difference matrix
// (Dirichlet: ghosts already moved to rhs; periodic: cyclic).
void Solver::implicit_solve(double r, std::span<const double> b, std::span<double> out) {
  const std::size_t n = b.size();
  const double off = -r;
  const double dia = 1.0 + 2.0 * r;

  // Thomas algorithm for a constant tridiagonal matrix with the first and
  // last diagonal entries replaced.
  auto thomas = [&](double d_first, double d_last, std::span<const double> rhs, std::span<double> x) {
    std::vector<double>& cp = diag_;
    double denom = d_first;
    cp[0] = off / denom;
    x[0] = rhs[0] / denom;
    for (std::size_t i = 1; i < n; ++i) {
      const double d = (i == n - 1) ? d_last : dia;
      denom = d - off * cp[i - 1];
      cp[i] = off / denom;
      x[i] = (rhs[i] - off * x[i - 1]) / denom;
    }
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= cp[i] * x[i + 1];
  };

  if (!grid_.periodic()) {
    thomas(dia, dia, b, out);
    return;
  }
  // Sherman-Morrison for the corner entries A[0][n-1] = A[n-1][0] = off.
  const double gamma = -dia;
  thomas(dia - gamma, dia - off * off / gamma, b, out);
  std::vector<double>& e = rhs_buf_;
  std::vector<double>& zz = stage_;
  std::fill(e.begin(), e.end(), 0.0);
  e[0] = gamma;
  e[n - 1] = off;
  thomas(dia - gamma, dia - off * off / gamma, e, zz);
  const double factor = (out[0] + off * out[n - 1] / gamma) / (1.0 + zz[0] + off * zz[n - 1] / gamma);
  for (std::size_t i = 0; i < n; ++i) out[i] -= factor * zz[i];
}

// TR-BDF2 for u_t = D u_xx with gamma = 2 - sqrt(2); L-stable and second order.
// On Dirichlet grids the end nodes are pinned and act as the ghosts of the
// interior system.
void Solver::diffuse_trbdf2(std::vector<double>& state, double dt) {
  const bool periodic = grid_.periodic();
  std::span<double> u(state);
  double gl = 0.0, gr = 0.0;
  if (!periodic) {
    if (state.size() < 3) return;
    gl = state.front();
    gr = state.back();
    u = u.subspan(1, state.size() - 2);
  }
  const std::size_t n = u.size();
  const double gamma = 2.0 - std::sqrt(2.0);
  const double h = grid_.spacing();
  const double scale = params_.diffusion * dt / (h * h);
  const double r1 = 0.5 * gamma * scale;
  const double w = (1.0 - gamma) / (2.0 - gamma);
  const double r2 = w * scale;

  std::vector<double> lap(n), b(n), star(n);
  kernels::laplacian(u, 1.0, 1.0, periodic, gl, gr, lap);
  for (std::size_t i = 0; i < n; ++i) b[i] = u[i] + r1 * lap[i];
  if (!periodic) {
    b[0] += r1 * gl;
    b[n - 1] += r1 * gr;
  }
  implicit_solve(r1, b, star);

  const double c = 1.0 / (gamma * (2.0 - gamma));
  const double c_old = (1.0 - gamma) * (1.0 - gamma) * c;
  for (std::size_t i = 0; i < n; ++i) b[i] = c * star[i] - c_old * u[i];
  if (!periodic) {
    b[0] += r2 * gl;
    b[n - 1] += r2 * gr;
  }
  implicit_solve(r2, b, u);
}

void Solver::step(std::vector<double>& u, double dt) {
  if (u.size() != grid_.node_count()) throw Error("state length does not match the grid");
  pin_ends(u);
  if (config_.integrator == Integrator::RK4) {
    rk4(u, dt, true);
    return;
  }
  // Strang splitting: reaction half step, implicit diffusion, reaction half step.
  rk4(u, 0.5 * dt, false);
  if (params_.diffusion != 0.0) diffuse_trbdf2(u, dt);
  rk4(u, 0.5 * dt, false);
}

bool Solver::saturated(std::span<const double> u) const {
  if (config_.saturation_fraction == 0.0) return false;
  const double w0 = conv_.weights().at(0);
  if (!(w0 <= kResolvedCentralWeight)) return false;
  const double level = config_.saturation_fraction / (params_.kappa * w0);
  const std::size_t n = u.size();
  const bool periodic = grid_.periodic();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(u[i] > 0.0) || std::pow(u[i], params_.beta) < level) continue;
    const double left = i > 0 ? u[i - 1] : (periodic ? u[n - 1] : ghost_left());
    const double right = i + 1 < n ? u[i + 1] : (periodic ? u[0] : ghost_right());
    if (u[i] >= kSpikeRatio * std::max(left, right)) return true;
  }
  return false;
}

RunOutcome Solver::run(const Field& initial) {
  if (initial.size() != grid_.node_count()) throw ConfigError("initial field does not match the solver grid");
  RunOutcome out;
  std::vector<double> u = initial.data();
  pin_ends(u);
  double t = initial.time();
  const double t_end = config_.t_end;

  auto sup_inf = [](std::span<const double> v) {
    double s = 0.0, m = std::numeric_limits<double>::infinity();
    for (double x : v) {
      s = std::max(s, std::abs(x));
      m = std::min(m, x);
    }
    return std::pair{s, m};
  };

  auto [sup0, inf0] = sup_inf(u);
  out.snapshots.emplace_back(grid_, u, t);
  out.history.push_back({t, sup0, inf0, 0.0});

  std::vector<double> outputs;
  for (double s : config_.output_times)
    if (s > t && s < t_end) outputs.push_back(s);
  std::sort(outputs.begin(), outputs.end());
  outputs.erase(std::unique(outputs.begin(), outputs.end()), outputs.end());
  std::size_t next_out = 0;

  const double dt_cap = std::min(config_.dt_initial, max_stable_dt());
  double dt = dt_cap;
  double sup_old = sup0;
  int quiet = 0;
  int since_snapshot = 0;
  std::vector<double> trial(u.size());

  auto finish = [&](RunStatus status, BlowUpReason reason, std::span<const double> at) {
    out.status = status;
    out.reason = reason;
    out.event_time = t;
    out.event_location = grid_.x(argmax_abs(at));
  };

  while (t < t_end) {
    const double target = next_out < outputs.size() ? outputs[next_out] : t_end;
    // The slack absorbs the rounding accumulated in t, which would otherwise
    // leave a final step of a few ulps and a near-duplicate snapshot.
    const bool hits = target - t <= dt * (1.0 + 1e-6);
    const double h = hits ? target - t : dt;

    trial = u;
    step(trial, h);
    bool finite = true;
    for (double x : trial)
      if (!std::isfinite(x)) {
        finite = false;
        break;
      }
    const auto [sup_new, inf_new] = finite ? sup_inf(trial) : std::pair{0.0, 0.0};
    const bool reject =
        !finite || (config_.adaptive && (inf_new < -kNegativeTolerance || sup_new > 2.0 * sup_old));
    if (reject) {
      ++out.rejected_steps;
      quiet = 0;
      if (!config_.adaptive) {
        finish(RunStatus::BlowUpDetected, BlowUpReason::NonFinite, u);
        break;
      }
      dt = 0.5 * h;
      if (dt < config_.dt_min) {
        finish(RunStatus::DtUnderflow, BlowUpReason::DtUnderflow, u);
        break;
      }
      continue;
    }

    for (double& x : trial)
      if (x < 0.0 && x >= -kNegativeTolerance) {
        x = 0.0;
        ++out.clamped_count;
      }
    u.swap(trial);
    t = hits ? target : t + h;
    ++out.accepted_steps;
    const auto [s, m] = sup_inf(u);
    sup_old = s;
    out.history.push_back({t, s, m, h});

    if (s >= config_.blowup_threshold) {
      finish(RunStatus::BlowUpDetected, BlowUpReason::Threshold, u);
      break;
    }
    if (saturated(u)) {
      finish(RunStatus::BlowUpDetected, BlowUpReason::GridSaturation, u);
      break;
    }

    if (++quiet >= kQuietStepsBeforeGrowth && dt < dt_cap) {
      dt = std::min(2.0 * dt, dt_cap);
      quiet = 0;
    }

    const bool at_output = hits && next_out < outputs.size();
    if (at_output) ++next_out;
    ++since_snapshot;
    if (at_output || (config_.snapshot_stride > 0 && since_snapshot >= config_.snapshot_stride)) {
      out.snapshots.emplace_back(grid_, u, t);
      since_snapshot = 0;
    }
  }

  if (out.snapshots.back().time() < t) out.snapshots.emplace_back(grid_, u, t);
  return out;
}

Field rhs(const Field& field, const ModelParams& params, const Kernel& kernel, ConvolutionMethod method) {
  SolverConfig config;
  config.convolution_method = method;
  Solver solver(field.grid(), params, kernel, config);
  std::vector<double> out(field.size());
  solver.rhs(field.values(), out);
  return Field(field.grid(), std::move(out), field.time());
}

Field step(const Field& field, const ModelParams& params, const Kernel& kernel, const SolverConfig& config) {
  Solver solver(field.grid(), params, kernel, config);
  if (config.dt_initial > solver.max_stable_dt())
    throw ConfigError("dt exceeds the explicit diffusion stability bound cfl_safety * h^2 / (2 D)");
  std::vector<double> u = field.data();
  solver.step(u, config.dt_initial);
  for (double x : u)
    if (!std::isfinite(x)) throw Error("step produced a non-finite value");
  return Field(field.grid(), std::move(u), field.time() + config.dt_initial);
}

RunOutcome run(const Field& initial, const ModelParams& params, const Kernel& kernel, const SolverConfig& config) {
  Solver solver(initial.grid(), params, kernel, config);
  return solver.run(initial);
}

}  // namespace nlfkpp
