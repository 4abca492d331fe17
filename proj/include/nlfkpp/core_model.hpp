#pragma once

// Domain types for u_t = D u_xx + mu u^alpha (1 - kappa J * u^beta) on a 1D grid.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace nlfkpp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user-supplied parameters or configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct ModelParams {
  double alpha = 1.0;      // Allee exponent, >= 1
  double beta = 1.0;       // competition exponent, > 0
  double mu = 1.0;         // interaction rate, > 0
  double kappa = 1.0;      // competition strength, > 0
  double diffusion = 1.0;  // coefficient of u_xx, >= 0

  /// Throws ConfigError when any invariant is violated.
  void validate() const;
};

/// kappa^(-1/beta): the positive constant steady state.
double steady_state(const ModelParams& params);

enum class KernelShape { Uniform, Logistic, Gaussian, Tabulated, Dirac };

std::string to_string(KernelShape shape);
KernelShape kernel_shape_from_string(const std::string& name);

/// Unit-mass, nonnegative interaction kernel J_sigma(x) = J(x / sigma) / sigma.
///
/// Built-in shapes carry analytic CDFs, so discrete weights are exact cell
/// integrals. `delta0`/`eta` are the constants for which J > eta on
/// [-delta0, delta0]; the accessors return them for the scaled kernel.
class Kernel {
 public:
  static Kernel uniform(double sigma = 1.0);
  static Kernel logistic(double sigma = 1.0);
  static Kernel gaussian(double sigma = 1.0);
  /// Point evaluation of the local (Dirac) limit is not defined; only its
  /// discrete weights {1} are.
  static Kernel dirac();
  /// Samples are (x, y) pairs with strictly increasing x and y >= 0. The
  /// piecewise-linear interpolant is renormalized to unit mass.
  static Kernel tabulated(std::vector<std::pair<double, double>> samples, double delta0,
                          double eta, double sigma = 1.0);

  KernelShape shape() const { return shape_; }
  double sigma() const { return sigma_; }
  Kernel with_sigma(double sigma) const;

  double evaluate(double x) const;
  /// Integral of J_sigma over (-inf, x].
  double cdf(double x) const;
  /// Integral of J_sigma over [a, b], computed in the numerically favourable tail.
  double mass_between(double a, double b) const;

  /// Support [lo, hi] of the scaled kernel outside which it is below 1e-16.
  std::pair<double, double> support() const;

  double delta0() const { return base_delta0_ * sigma_; }
  double eta() const { return base_eta_ / sigma_; }
  double base_delta0() const { return base_delta0_; }
  double base_eta() const { return base_eta_; }

  const std::vector<std::pair<double, double>>& samples() const { return samples_; }

 private:
  Kernel(KernelShape shape, double sigma, double delta0, double eta);

  double base_evaluate(double y) const;
  double base_cdf(double y) const;
  double base_survival(double y) const;

  KernelShape shape_;
  double sigma_;
  double base_delta0_;
  double base_eta_;
  std::vector<std::pair<double, double>> samples_;  // normalized, base coordinates
  std::vector<double> sample_cdf_;                  // cumulative mass at each sample x
};

/// Discrete kernel weights on a uniform grid: w[k - offset] is the mass of
/// J_sigma on the cell [(k - 1/2) h, (k + 1/2) h]. Weights sum to exactly 1
/// up to rounding (they are renormalized after truncation).
struct KernelWeights {
  std::vector<double> w;
  int offset = 0;  // offset index: k ranges over [offset, offset + w.size())

  int k_lo() const { return offset; }
  int k_hi() const { return offset + static_cast<int>(w.size()) - 1; }
  double at(int k) const {
    return (k < k_lo() || k > k_hi()) ? 0.0 : w[static_cast<std::size_t>(k - offset)];
  }
};

KernelWeights discrete_weights(const Kernel& kernel, double spacing);

struct DirichletExtension {
  double left_value = 1.0;
  double right_value = 0.0;
};
struct Periodic {};
using BoundaryPolicy = std::variant<DirichletExtension, Periodic>;

/// Uniform 1D grid. Periodic grids have n_cells nodes (x_right identified
/// with x_left); Dirichlet-extended grids have n_cells + 1 nodes including
/// both endpoints, with the extension values prescribed outside.
class Grid1D {
 public:
  Grid1D(double x_left, double x_right, int n_cells, BoundaryPolicy boundary);

  double x_left() const { return x_left_; }
  double x_right() const { return x_right_; }
  int n_cells() const { return n_cells_; }
  double spacing() const { return (x_right_ - x_left_) / n_cells_; }
  double length() const { return x_right_ - x_left_; }
  std::size_t node_count() const;
  double x(std::size_t i) const { return x_left_ + static_cast<double>(i) * spacing(); }
  std::vector<double> nodes() const;

  const BoundaryPolicy& boundary() const { return boundary_; }
  bool periodic() const { return std::holds_alternative<Periodic>(boundary_); }
  /// Only valid for Dirichlet-extended grids.
  const DirichletExtension& extension() const;

 private:
  double x_left_;
  double x_right_;
  int n_cells_;
  BoundaryPolicy boundary_;
};

/// Nodal values of u on a grid at a given time. All values must be finite.
class Field {
 public:
  Field(Grid1D grid, std::vector<double> values, double time = 0.0);

  const Grid1D& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  const std::vector<double>& data() const { return values_; }
  double time() const { return time_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  double sup_abs() const;
  double inf() const;

 private:
  Grid1D grid_;
  std::vector<double> values_;
  double time_;
};

/// Change of variables x -> x / sigma, t -> t / sigma^2 between the
/// sigma-width kernel formulation and the mu = sigma^2 formulation.
struct RescaleMap {
  double length_scale = 1.0;  // x_new = x_old / length_scale
  double time_scale = 1.0;    // t_new = t_old / time_scale
};

struct RescaledProblem {
  Kernel kernel;
  ModelParams params;
  RescaleMap map;
};

/// (kernel of width sigma, mu) -> (kernel of width 1, mu * sigma^2).
RescaledProblem rescale_to_mu(const Kernel& kernel, const ModelParams& params);
/// Inverse of rescale_to_mu: (kernel of width sigma, mu) -> (width sigma * sqrt(mu), mu = 1).
RescaledProblem rescale_to_sigma(const Kernel& kernel, const ModelParams& params);

/// Front-type initial datum: 1 left of x_l, Gaussian shoulder up to 0,
/// linear ramp to 0 at x_r, 0 beyond.
Field front_initial_condition(const Grid1D& grid);
double front_initial_value(double x, double x_left, double x_right);

}  // namespace nlfkpp
