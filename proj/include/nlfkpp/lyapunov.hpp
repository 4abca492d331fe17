#pragma once

// Entropy functional F(x,t) = int_{|y-x|<=delta} h(u^beta) dy, its dissipation D,
// a monitor for dF/dt <= Lap F - D on computed solutions, and diagnostics
// for convergence to the constant state and for pattern formation.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nlfkpp/core_model.hpp"
#include "nlfkpp/solver.hpp"

namespace nlfkpp {

struct LyapunovConfig {
  double delta = 0.2;       // window half-width; snapped to the nearest node multiple
  int interior_margin = 0;  // nodes excluded near each end of a non-periodic grid
  // Residual tolerance tol = residual_c1 * dt + residual_c2 * h^2. The defaults
  // come from the pure-diffusion calibration in the test suite with a
  // safety factor of 10 applied.
  double residual_c1 = 5.0;
  double residual_c2 = 5.0;
  // Relative slack when checking u <= kappa^(-1/beta) before monitoring.
  double hypothesis_slack = 0.0;

  void validate() const;
};

/// Entropy density; minimum 0 at s = 1/kappa. Throws for s <= 0 and for the
/// undefined branch alpha = 1 + beta.
double entropy_h(double s, const ModelParams& params);
double entropy_h_prime(double s, const ModelParams& params);

/// Number of grid cells in the window half-width: round(delta / h), at least 1.
int window_half_width(double delta, double spacing);

Field lyapunov_F(const Field& field, const ModelParams& params, const LyapunovConfig& config);
Field dissipation_D(const Field& field, const ModelParams& params, const LyapunovConfig& config, const Kernel& kernel);

/// Time-independent part of the residual, -Lap F + D, at every node.
/// Periodic grids only.
std::vector<double> steady_residual(const Field& field, const ModelParams& params, const LyapunovConfig& config,
                                    const Kernel& kernel);

/// Largest window half-width for which the differential inequality is
/// derived, with the Young constant C = 1/2.
double admissible_delta_max(const ModelParams& params, const Kernel& kernel);

struct ResidualPair {
  double t0 = 0.0;
  double t1 = 0.0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  double location = 0.0;
};

struct ResidualReport {
  std::vector<ResidualPair> pairs;
  bool passed = false;
  bool refused = false;
  std::string refusal;  // hypothesis violation with its location
  double delta_used = 0.0;
  double delta_admissible = 0.0;
  bool delta_in_range = true;
  std::string note;
  double worst_excess() const;  // max over pairs of max_residual - tolerance
};

ResidualReport monitor_inequality(const std::vector<Field>& snapshots, const ModelParams& params,
                                  const Kernel& kernel, const LyapunovConfig& config);
ResidualReport monitor_inequality(const RunOutcome& run, const ModelParams& params, const Kernel& kernel,
                                  const LyapunovConfig& config);

struct HairTriggerReport {
  double a = 0.0;
  double b = 0.0;
  double target = 0.0;
  std::vector<std::pair<double, double>> sup_distance_series;  // (t, sup_[a,b] |u - target|)
  bool converged = false;
  std::optional<double> converged_time;
  bool hypothesis_A = false;   // 0 <= u0 <= kappa^(-1/beta)
  double hypothesis_B_sup = 0; // sup over nodes of the windowed log / power integral of u0
  bool hypothesis_B = false;   // that sup is finite
};

HairTriggerReport hair_trigger_diagnose(const std::vector<Field>& snapshots, const ModelParams& params, double a,
                                        double b, double tol, double horizon, double delta = 0.2);
HairTriggerReport hair_trigger_diagnose(const RunOutcome& run, const ModelParams& params, double a, double b,
                                        double tol, double horizon, double delta = 0.2);

struct PatternMetrics {
  int crossing_count = 0;
  double max_amplitude = 0.0;
  double dominant_wavelength = 0.0;  // 0 when the field is constant
};

PatternMetrics pattern_metrics(const Field& field, double level);

}  // namespace nlfkpp
