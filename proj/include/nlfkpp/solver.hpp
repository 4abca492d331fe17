#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nlfkpp/convolution.hpp"
#include "nlfkpp/core_model.hpp"

namespace nlfkpp {

enum class Integrator { RK4, IMEX };

std::string to_string(Integrator integrator);
Integrator integrator_from_string(const std::string& name);

struct SolverConfig {
  double dt_initial = 1e-4;
  double dt_min = 1e-9;
  double cfl_safety = 0.9;  // RK4 only: dt <= cfl_safety * h^2 / (2 D)
  double t_end = 1.0;
  double blowup_threshold = 1e12;
  ConvolutionMethod convolution_method = ConvolutionMethod::FFT;
  Integrator integrator = Integrator::RK4;
  int snapshot_stride = 100;          // accepted steps between snapshots; 0 = none
  std::vector<double> output_times;   // extra snapshot times hit exactly
  bool adaptive = true;
  // Declare blow-up when a one-node spike (at least twice both neighbours)
  // reaches kappa * w_0 * u^beta >= saturation_fraction, where w_0 is the
  // central kernel weight. The semi-discrete solution can never exceed
  // (kappa w_0)^(-1/beta), so a continuum singularity shows up as a spike
  // pinned near this grid-scale ceiling rather than as overflow, while a
  // resolved aggregate spans several nodes and its ratio halves when the
  // grid is refined. 0 disables the check.
  double saturation_fraction = 0.25;

  void validate() const;
};

enum class RunStatus { CompletedBounded, BlowUpDetected, DtUnderflow };
enum class BlowUpReason { None, Threshold, NonFinite, GridSaturation, DtUnderflow };

std::string to_string(RunStatus status);
std::string to_string(BlowUpReason reason);

struct HistoryPoint {
  double t;
  double sup_u;
  double inf_u;
  double dt;
};

struct RunOutcome {
  RunStatus status = RunStatus::CompletedBounded;
  BlowUpReason reason = BlowUpReason::None;
  double event_time = 0.0;
  double event_location = 0.0;  // node of largest |u| at the event
  std::vector<Field> snapshots;
  std::vector<HistoryPoint> history;  // one entry per accepted step, plus t = 0
  std::size_t clamped_count = 0;      // values in [-1e-10, 0) reset to 0
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;

  bool blew_up() const { return status != RunStatus::CompletedBounded; }
  const Field& final_field() const { return snapshots.back(); }
};

/// Method-of-lines integrator for one (grid, params, kernel) triple. Owns its
/// convolution plans and scratch storage, so an instance belongs to one thread.
class Solver {
 public:
  Solver(const Grid1D& grid, const ModelParams& params, const Kernel& kernel, const SolverConfig& config);

  const Grid1D& grid() const { return grid_; }
  const ModelParams& params() const { return params_; }
  const SolverConfig& config() const { return config_; }
  const Convolver& convolver() const { return conv_; }

  /// Largest step the configured integrator accepts.
  double max_stable_dt() const;

  /// out = D Lap u + mu u^alpha (1 - kappa J * u^beta). On Dirichlet grids
  /// the two end nodes hold the prescribed exterior values and get 0.
  void rhs(std::span<const double> u, std::span<double> out);
  /// Reaction part only.
  void reaction(std::span<const double> u, std::span<double> out);

  /// One step of size dt in place. Does not clamp or check.
  void step(std::vector<double>& u, double dt);

  RunOutcome run(const Field& initial);

 private:
  void rk4(std::vector<double>& u, double dt, bool with_diffusion);
  void diffuse_trbdf2(std::vector<double>& u, double dt);
  void implicit_solve(double r, std::span<const double> rhs, std::span<double> out);
  double ghost_left() const;
  double ghost_right() const;
  void pin_ends(std::span<double> u) const;
  void zero_ends(std::span<double> out) const;
  bool saturated(std::span<const double> u) const;

  Grid1D grid_;
  ModelParams params_;
  SolverConfig config_;
  Convolver conv_;
  double ext_left_beta_ = 0.0;
  double ext_right_beta_ = 0.0;
  std::vector<double> pow_, conv_out_, k1_, k2_, k3_, k4_, tmp_, stage_, diag_, rhs_buf_;
};

/// D Lap u + mu u^alpha (1 - kappa J * u^beta) as a field.
Field rhs(const Field& field, const ModelParams& params, const Kernel& kernel,
          ConvolutionMethod method = ConvolutionMethod::FFT);

/// One step of size config.dt_initial.
Field step(const Field& field, const ModelParams& params, const Kernel& kernel, const SolverConfig& config);

RunOutcome run(const Field& initial, const ModelParams& params, const Kernel& kernel, const SolverConfig& config);

}  // namespace nlfkpp
