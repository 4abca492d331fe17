#include "nlfkpp/lyapunov.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fftw_lock.hpp"
#include "nlfkpp/kernels.hpp"

namespace nlfkpp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double pos_pow(double u, double p) { return u > 0.0 ? std::pow(u, p) : 0.0; }

std::string node_label(const Grid1D& grid, std::size_t i) {
  std::ostringstream os;
  os << "node " << i << " (x = " << grid.x(i) << ")";
  return os.str();
}

// h(u_i^beta) at every node; throws on a non-positive value.
std::vector<double> entropy_density(const Field& field, const ModelParams& params) {
  std::vector<double> g(field.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(field[i] > 0.0))
      throw Error("entropy window contains the non-positive value " + std::to_string(field[i]) + " at " +
                  node_label(field.grid(), i));
    g[i] = entropy_h(std::pow(field[i], params.beta), params);
  }
  return g;
}

std::vector<double> dissipation_density(const Field& field, const ModelParams& params) {
  std::vector<double> g(field.size());
  const double inv_kappa = 1.0 / params.kappa;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double d = inv_kappa - pos_pow(field[i], params.beta);
    g[i] = d * d;
  }
  return g;
}

double dissipation_prefactor(const ModelParams& params, const Kernel& kernel, double delta_used) {
  return 0.5 * kernel.eta() * params.mu * params.kappa * (2.0 * delta_used);
}

// Trapezoid window sums. Outside a non-periodic grid the supplied values
// are used; NaN marks windows that must not be read.
std::vector<double> window(const std::vector<double>& g, int m, const Grid1D& grid, double outside_left,
                           double outside_right) {
  std::vector<double> out(g.size());
  kernels::window_trapezoid(g, m, grid.spacing(), grid.periodic(), outside_left, outside_right, out);
  return out;
}

struct Snapshot {
  std::vector<double> F;
  std::vector<double> D;
};

}  // namespace

void LyapunovConfig::validate() const {
  if (!(delta > 0.0)) throw ConfigError("lyapunov delta must be > 0");
  if (interior_margin < 0) throw ConfigError("interior_margin must be >= 0");
  if (!(residual_c1 >= 0.0 && residual_c2 >= 0.0)) throw ConfigError("residual constants must be >= 0");
  if (!(hypothesis_slack >= 0.0)) throw ConfigError("hypothesis_slack must be >= 0");
}

double entropy_h(double s, const ModelParams& params) {
  if (!(s > 0.0)) throw Error("entropy h is defined only for s > 0");
  const double a = params.alpha, b = params.beta, k = params.kappa;
  if (a == 1.0) return s / b - std::log(s) / (k * b) - (1.0 + std::log(k)) / (k * b);
  if (a == 1.0 + b) throw Error("entropy h is undefined for alpha = 1 + beta (removable singularity)");
  const double q = 1.0 + b - a;
  return std::pow(s, q / b) / q - std::pow(s, (1.0 - a) / b) / (k * (1.0 - a)) +
         std::pow(k, -q / b) * (1.0 / (1.0 - a) - 1.0 / q);
}

double entropy_h_prime(double s, const ModelParams& params) {
  if (!(s > 0.0)) throw Error("entropy h is defined only for s > 0");
  const double a = params.alpha, b = params.beta, k = params.kappa;
  if (a == 1.0) return 1.0 / b - 1.0 / (k * b * s);
  return (std::pow(s, (1.0 - a) / b) - std::pow(s, (1.0 - a - b) / b) / k) / b;
}

int window_half_width(double delta, double spacing) {
  if (!(delta > 0.0) || !(spacing > 0.0)) throw ConfigError("window half-width needs delta > 0 and h > 0");
  return std::max(1, static_cast<int>(std::lround(delta / spacing)));
}

Field lyapunov_F(const Field& field, const ModelParams& params, const LyapunovConfig& config) {
  config.validate();
  const Grid1D& grid = field.grid();
  const int m = window_half_width(config.delta, grid.spacing());
  const std::vector<double> g = entropy_density(field, params);
  double ol = kNaN, orr = kNaN;
  if (!grid.periodic()) {
    const auto& ext = grid.extension();
    const std::size_t n = field.size();
    if (!(ext.left_value > 0.0) && n > 0)
      throw Error("entropy window at " + node_label(grid, 0) + " reaches the non-positive left extension value");
    if (!(ext.right_value > 0.0))
      throw Error("entropy window at " + node_label(grid, n - 1) + " reaches the non-positive right extension value");
    ol = entropy_h(std::pow(ext.left_value, params.beta), params);
    orr = entropy_h(std::pow(ext.right_value, params.beta), params);
  }
  return Field(grid, window(g, m, grid, ol, orr), field.time());
}

Field dissipation_D(const Field& field, const ModelParams& params, const LyapunovConfig& config,
                    const Kernel& kernel) {
  config.validate();
  const Grid1D& grid = field.grid();
  const int m = window_half_width(config.delta, grid.spacing());
  for (std::size_t i = 0; i < field.size(); ++i)
    if (!(field[i] > 0.0))
      throw Error("dissipation window contains the non-positive value " + std::to_string(field[i]) + " at " +
                  node_label(grid, i));
  const std::vector<double> g = dissipation_density(field, params);
  double ol = 0.0, orr = 0.0;
  if (!grid.periodic()) {
    const double inv_kappa = 1.0 / params.kappa;
    ol = std::pow(inv_kappa - pos_pow(grid.extension().left_value, params.beta), 2);
    orr = std::pow(inv_kappa - pos_pow(grid.extension().right_value, params.beta), 2);
  }
  std::vector<double> d = window(g, m, grid, ol, orr);
  const double c = dissipation_prefactor(params, kernel, m * grid.spacing());
  for (double& x : d) x *= c;
  return Field(grid, std::move(d), field.time());
}

std::vector<double> steady_residual(const Field& field, const ModelParams& params, const LyapunovConfig& config,
                                    const Kernel& kernel) {
  if (!field.grid().periodic()) throw ConfigError("steady_residual needs a periodic grid");
  const Field F = lyapunov_F(field, params, config);
  const Field D = dissipation_D(field, params, config, kernel);
  std::vector<double> lap(field.size());
  kernels::laplacian(F.values(), field.grid().spacing(), 1.0, true, 0.0, 0.0, lap);
  std::vector<double> r(field.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = -lap[i] + D[i];
  return r;
}

double admissible_delta_max(const ModelParams& params, const Kernel& kernel) {
  const double C = 0.5;  // Young constant at epsilon = 1/2
  const double a = params.alpha, b = params.beta, k = params.kappa, mu = params.mu;
  const double kpow = std::pow(k, (a - 1.0) / b);
  const double ceiling =
      a <= b ? std::sqrt(a * kpow / (4.0 * mu * C * b * b)) : std::sqrt(kpow / (4.0 * C * b * mu));
  return std::min(0.5 * kernel.delta0(), ceiling);
}

double ResidualReport::worst_excess() const {
  double w = -std::numeric_limits<double>::infinity();
  for (const auto& p : pairs) w = std::max(w, p.max_residual - p.tolerance);
  return w;
}

ResidualReport monitor_inequality(const std::vector<Field>& snapshots, const ModelParams& params,
                                  const Kernel& kernel, const LyapunovConfig& config) {
  config.validate();
  ResidualReport report;
  if (snapshots.empty()) {
    report.passed = true;
    report.note = "no snapshots";
    return report;
  }
  const Grid1D& grid = snapshots.front().grid();
  const double h = grid.spacing();
  const int m = window_half_width(config.delta, h);
  report.delta_used = m * h;
  report.delta_admissible = admissible_delta_max(params, kernel);
  report.delta_in_range = report.delta_used < report.delta_admissible;
  if (!report.delta_in_range)
    report.note = "delta outside the admissible range of the derivation; inequality not guaranteed";

  // The inequality is derived for 0 < u <= kappa^(-1/beta); refuse otherwise.
  const double cap = steady_state(params) * (1.0 + config.hypothesis_slack);
  for (const Field& f : snapshots) {
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (f[i] > cap || !(f[i] > 0.0)) {
        std::ostringstream os;
        os << "hypothesis 0 < u <= kappa^(-1/beta) = " << steady_state(params) << " violated: u = " << f[i]
           << " at " << node_label(grid, i) << ", t = " << f.time();
        report.refused = true;
        report.refusal = os.str();
        report.passed = false;
        return report;
      }
    }
  }

  const std::size_t n = grid.node_count();
  std::size_t lo = 0, hi = n;  // half-open range of monitored nodes
  if (!grid.periodic()) {
    lo = static_cast<std::size_t>(std::max(config.interior_margin, m + 1));
    if (2 * lo >= n) throw ConfigError("grid too small for the window and interior margin");
    hi = n - lo;
  }

  const double c = dissipation_prefactor(params, kernel, report.delta_used);
  auto evaluate = [&](const Field& f) {
    Snapshot s;
    s.F = window(entropy_density(f, params), m, grid, kNaN, kNaN);
    s.D = window(dissipation_density(f, params), m, grid, kNaN, kNaN);
    for (double& x : s.D) x *= c;
    return s;
  };
  auto lap_at = [&](const std::vector<double>& F, std::size_t i) {
    const double left = i == 0 ? F[n - 1] : F[i - 1];
    const double right = i == n - 1 ? F[0] : F[i + 1];
    return ((left - F[i]) + (right - F[i])) / (h * h);
  };

  Snapshot prev = evaluate(snapshots.front());
  report.passed = true;
  for (std::size_t s = 1; s < snapshots.size(); ++s) {
    Snapshot cur = evaluate(snapshots[s]);
    const double dt = snapshots[s].time() - snapshots[s - 1].time();
    ResidualPair pair;
    pair.t0 = snapshots[s - 1].time();
    pair.t1 = snapshots[s].time();
    pair.tolerance = config.residual_c1 * dt + config.residual_c2 * h * h;
    pair.max_residual = -std::numeric_limits<double>::infinity();
    for (std::size_t i = lo; i < hi; ++i) {
      const double r = (cur.F[i] - prev.F[i]) / dt - 0.5 * (lap_at(prev.F, i) + lap_at(cur.F, i)) +
                       0.5 * (prev.D[i] + cur.D[i]);
      if (r > pair.max_residual) {
        pair.max_residual = r;
        pair.location = grid.x(i);
      }
    }
    if (pair.max_residual > pair.tolerance) report.passed = false;
    report.pairs.push_back(pair);
    prev = std::move(cur);
  }
  return report;
}

ResidualReport monitor_inequality(const RunOutcome& run, const ModelParams& params, const Kernel& kernel,
                                  const LyapunovConfig& config) {
  return monitor_inequality(run.snapshots, params, kernel, config);
}

HairTriggerReport hair_trigger_diagnose(const std::vector<Field>& snapshots, const ModelParams& params, double a,
                                        double b, double tol, double horizon, double delta) {
  if (snapshots.empty()) throw ConfigError("hair-trigger diagnosis needs at least one snapshot");
  if (!(a < b)) throw ConfigError("compact set must satisfy a < b");
  if (!(tol > 0.0)) throw ConfigError("tolerance must be > 0");
  const Grid1D& grid = snapshots.front().grid();
  if (!(a > grid.x_left() && b < grid.x_right())) throw ConfigError("compact set must lie strictly inside the grid");

  HairTriggerReport r;
  r.a = a;
  r.b = b;
  r.target = steady_state(params);

  std::vector<std::size_t> nodes;
  for (std::size_t i = 0; i < grid.node_count(); ++i)
    if (grid.x(i) >= a && grid.x(i) <= b) nodes.push_back(i);

  for (const Field& f : snapshots) {
    double d = 0.0;
    for (std::size_t i : nodes) d = std::max(d, std::abs(f[i] - r.target));
    r.sup_distance_series.emplace_back(f.time(), d);
  }

  // Converged when the distance drops below tol no later than the horizon and
  // stays below through the last snapshot.
  std::size_t first_good = r.sup_distance_series.size();
  for (std::size_t s = r.sup_distance_series.size(); s-- > 0;) {
    if (r.sup_distance_series[s].second >= tol) break;
    first_good = s;
  }
  if (first_good < r.sup_distance_series.size() && r.sup_distance_series[first_good].first <= horizon) {
    r.converged = true;
    r.converged_time = r.sup_distance_series[first_good].first;
  }

  const Field& u0 = snapshots.front();
  r.hypothesis_A = true;
  for (double x : u0.values())
    if (x < 0.0 || x > r.target) r.hypothesis_A = false;

  // Windowed integrals of ln u0 (alpha = 1) or u0^(1 - alpha) (alpha > 1).
  auto density = [&](double x) {
    if (!(x > 0.0)) return params.alpha == 1.0 ? -std::numeric_limits<double>::infinity()
                                               : std::numeric_limits<double>::infinity();
    return params.alpha == 1.0 ? std::log(x) : std::pow(x, 1.0 - params.alpha);
  };
  std::vector<double> g(u0.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = density(u0[i]);
  double ol = 0.0, orr = 0.0;
  if (!grid.periodic()) {
    ol = density(grid.extension().left_value);
    orr = density(grid.extension().right_value);
  }
  const std::vector<double> w = window(g, window_half_width(delta, grid.spacing()), grid, ol, orr);
  r.hypothesis_B_sup = 0.0;
  for (double x : w) r.hypothesis_B_sup = std::isnan(x) ? x : std::max(r.hypothesis_B_sup, std::abs(x));
  r.hypothesis_B = std::isfinite(r.hypothesis_B_sup);
  return r;
}

HairTriggerReport hair_trigger_diagnose(const RunOutcome& run, const ModelParams& params, double a, double b,
                                        double tol, double horizon, double delta) {
  return hair_trigger_diagnose(run.snapshots, params, a, b, tol, horizon, delta);
}

PatternMetrics pattern_metrics(const Field& field, double level) {
  PatternMetrics pm;
  const std::size_t n = field.size();
  const Grid1D& grid = field.grid();
  const double eps = 1e-12 * std::max(1.0, std::abs(level));

  int prev_sign = 0, first_sign = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = field[i] - level;
    pm.max_amplitude = std::max(pm.max_amplitude, std::abs(d));
    if (std::abs(d) <= eps) continue;
    const int sign = d > 0.0 ? 1 : -1;
    if (first_sign == 0) first_sign = sign;
    if (prev_sign != 0 && sign != prev_sign) ++pm.crossing_count;
    prev_sign = sign;
  }
  if (grid.periodic() && prev_sign != 0 && first_sign != prev_sign) ++pm.crossing_count;

  double mean = 0.0;
  for (double x : field.values()) mean += x;
  mean /= static_cast<double>(n);
  double spread = 0.0;
  for (double x : field.values()) spread = std::max(spread, std::abs(x - mean));
  if (n < 2 || spread <= 1e-14 * std::max(1.0, std::abs(mean))) return pm;

  double* in = fftw_alloc_real(n);
  fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
  }
  for (std::size_t i = 0; i < n; ++i) in[i] = field[i] - mean;
  fftw_execute(plan);
  std::size_t peak = 1;
  double best = -1.0;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    const double mag = std::hypot(out[k][0], out[k][1]);
    if (mag > best) {
      best = mag;
      peak = k;
    }
  }
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  const double period = grid.periodic() ? grid.length() : grid.spacing() * static_cast<double>(n);
  pm.dominant_wavelength = period / static_cast<double>(peak);
  return pm;
}

}  // namespace nlfkpp
