#pragma once

// Node-parallel inner loops of the solver.
//
// Every routine exists twice: an OpenMP version used by the solver, and a
// plain serial version in `kernels::serial` kept as the reference the tests
// and the benchmark compare against. Each output entry is computed by the
// same arithmetic in both, so results agree bit for bit.

#include <span>

#include "nlfkpp/core_model.hpp"

namespace nlfkpp::kernels {

/// out_i = sum_k w_k v_{(i - k) mod n}.
void convolve_periodic(const KernelWeights& weights, std::span<const double> v, std::span<double> out);

/// out_i = sum_k w_k v_{i - k}, with v = 0 outside [0, n).
void convolve_linear(const KernelWeights& weights, std::span<const double> v, std::span<double> out);

/// out_i = max(u_i, 0)^p. Exponent 1 and 2 take exact fast paths.
void clamped_power(std::span<const double> u, double p, std::span<double> out);

/// Second-order central difference scaled by `coefficient / h^2`. Periodic
/// grids wrap; otherwise `ghost_left`/`ghost_right` stand in for the
/// neighbours outside the grid.
void laplacian(std::span<const double> u, double h, double coefficient, bool periodic, double ghost_left,
               double ghost_right, std::span<double> out);

/// out_i += mu * max(u_i,0)^alpha * (1 - kappa * conv_i).
void add_reaction(std::span<const double> u, std::span<const double> conv, double alpha, double mu,
                  double kappa, std::span<double> out);

/// Trapezoid sum over the 2m+1 nodes centred at each node:
/// out_i = h * (g_{i-m}/2 + g_{i-m+1} + ... + g_{i+m}/2).
/// Nodes outside [0, n) take `outside_left`/`outside_right` unless periodic.
void window_trapezoid(std::span<const double> g, int half_width, double h, bool periodic, double outside_left,
                      double outside_right, std::span<double> out);

namespace serial {
void convolve_periodic(const KernelWeights& weights, std::span<const double> v, std::span<double> out);
void convolve_linear(const KernelWeights& weights, std::span<const double> v, std::span<double> out);
void clamped_power(std::span<const double> u, double p, std::span<double> out);
void laplacian(std::span<const double> u, double h, double coefficient, bool periodic, double ghost_left,
               double ghost_right, std::span<double> out);
void add_reaction(std::span<const double> u, std::span<const double> conv, double alpha, double mu,
                  double kappa, std::span<double> out);
void window_trapezoid(std::span<const double> g, int half_width, double h, bool periodic, double outside_left,
                      double outside_right, std::span<double> out);
}  // namespace serial

/// Fold the weights onto n periodic slots: f_j = sum_{k = j mod n} w_k.
std::vector<double> fold_periodic(const KernelWeights& weights, std::size_t n);

}  // namespace nlfkpp::kernels
