#pragma once

// Two-speed velocity-jump model in one dimension:
//   dp+/dt = -(s/eps) dp+/dx + L+ / eps^2 + I+
//   dp-/dt = +(s/eps) dp-/dx + L- / eps^2 + I-
// with turning operator L = (p_other - p_self) / 2 (turning kernel equal to the
// equilibrium M = 1/2 on {-s, +s}) and the nonlocal interaction I. As eps -> 0
// the density u = p+ + p- solves u_t = s^2 u_xx + mu u^alpha (1 - kappa J * u^beta).
//
// The interaction constant kappa~ is carried in ModelParams::kappa, and
// ModelParams::mu multiplies I; mu = 1 is the operator as written.

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "nlfkpp/convolution.hpp"
#include "nlfkpp/core_model.hpp"

namespace nlfkpp {

struct KineticState {
  Grid1D grid;  // periodic
  std::vector<double> p_plus;
  std::vector<double> p_minus;
  double eps = 0.1;
  double speed = 1.0;
  double time = 0.0;

  /// Isotropic split p+ = p- = u0 / 2.
  static KineticState isotropic(const Field& u0, double eps, double speed);

  void validate() const;
  std::vector<double> density() const;
};

struct KineticConfig {
  double dt = 0.0;   // 0 selects the largest step allowed by cfl
  double cfl = 1.0;  // dt <= cfl * eps * h / s; at exactly 1 transport is an exact shift
  double t_end = 1.0;
  ConvolutionMethod convolution_method = ConvolutionMethod::FFT;
  bool transport = true;
  bool relaxation = true;
  bool interaction = true;

  void validate() const;
};

/// (L+, L-) nodewise.
std::pair<std::vector<double>, std::vector<double>> turning_operator(const KineticState& state);

/// (I+, I-) nodewise: I = mu [p^alpha / int M^alpha - kappa~ p^alpha (J * p^beta) / int M^(alpha+beta)]
/// with int M^q = 2^(1-q) for the two-speed equilibrium.
std::pair<std::vector<double>, std::vector<double>> interaction_operator(const KineticState& state,
                                                                         const ModelParams& params,
                                                                         const Kernel& kernel);

/// Stepper holding convolution plans for one grid.
class KineticStepper {
 public:
  KineticStepper(const Grid1D& grid, const ModelParams& params, const Kernel& kernel, const KineticConfig& config);

  /// Step size chosen for the given state (config.dt or the CFL limit).
  double step_size(const KineticState& state) const;

  /// Strang step: half relaxation, transport, half relaxation, then interaction.
  /// Throws ConfigError when dt violates the transport CFL bound.
  void step(KineticState& state, double dt);

  /// Largest |L+ + L-| seen across all steps so far.
  double max_turning_imbalance() const { return max_turning_imbalance_; }
  /// Most negative density component seen after any step (0 if none).
  double min_density_component() const { return min_component_; }

 private:
  void relax(KineticState& state, double tau) const;
  void transport(KineticState& state, double courant) const;
  void interact(KineticState& state, double dt);

  Grid1D grid_;
  ModelParams params_;
  KineticConfig config_;
  Convolver conv_;
  double max_turning_imbalance_ = 0.0;
  double min_component_ = 0.0;
  std::vector<double> pow_, conv_out_;
};

struct KineticRun {
  KineticState final_state;
  std::vector<std::pair<double, std::vector<double>>> densities;  // (t, u) at every stride
  std::size_t steps = 0;
  double max_turning_imbalance = 0.0;
  double min_density_component = 0.0;
};

KineticState kinetic_step(const KineticState& state, const ModelParams& params, const Kernel& kernel,
                          const KineticConfig& config);
KineticRun kinetic_run(const KineticState& initial, const ModelParams& params, const Kernel& kernel,
                       const KineticConfig& config, int density_stride = 0);

/// D = s^2 / N.
double diffusion_coefficient(double speed, int N);

struct KineticLimitRow {
  double eps = 0.0;
  int n_cells = 0;
  double error = 0.0;  // L-infinity distance of p+ + p- from the parabolic solution
  double order = 0.0;  // log(e_prev / e) / log(eps_prev / eps); NaN on the first row
  double max_turning_imbalance = 0.0;
  double min_density_component = 0.0;
};

struct KineticLimitSetup {
  double x_left = -3.0;
  double x_right = 3.0;
  double speed = 1.0;
  double t_end = 0.5;
  // h = cell_factor * eps^2 keeps the lattice correction h^2 / (12 eps^2) at O(eps^2).
  double cell_factor = 2.0;
  double reference_dt = 1e-4;
  std::function<double(double)> initial = [](double x) { return 0.2 + 0.6 * std::exp(-2.0 * x * x); };
};

/// For each eps: run the kinetic model from the isotropic split of the initial
/// density and compare with the parabolic solver (diffusion s^2) on the same grid.
std::vector<KineticLimitRow> kinetic_limit_study(const ModelParams& params, const Kernel& kernel,
                                                 const std::vector<double>& eps_values,
                                                 const KineticLimitSetup& setup = {});

}  // namespace nlfkpp
