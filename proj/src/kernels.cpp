#include "nlfkpp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace nlfkpp::kernels {

namespace {

using Index = std::ptrdiff_t;

inline Index wrap(Index j, Index n) {
  j %= n;
  return j < 0 ? j + n : j;
}

// Weights whose span exceeds the period are folded first so each node sums
// over at most n slots.
inline double periodic_node(const double* w, Index k_lo, Index count, const double* v, Index n, Index i) {
  double s = 0.0;
  Index j = wrap(i - k_lo, n);
  for (Index k = 0; k < count; ++k) {
    s += w[k] * v[j];
    j = (j == 0) ? n - 1 : j - 1;
  }
  return s;
}

inline double linear_node(const double* w, Index k_lo, Index k_hi, const double* v, Index n, Index i) {
  const Index k_begin = std::max(k_lo, i - n + 1);
  const Index k_end = std::min(k_hi, i);
  double s = 0.0;
  for (Index k = k_begin; k <= k_end; ++k) s += w[k - k_lo] * v[i - k];
  return s;
}

inline double power_node(double u, double p) {
  const double x = u > 0.0 ? u : 0.0;
  if (p == 1.0) return x;
  if (p == 2.0) return x * x;
  return std::pow(x, p);
}

inline double laplacian_node(const double* u, Index n, Index i, double scale, bool periodic, double gl, double gr) {
  double left, right;
  if (periodic) {
    left = u[i == 0 ? n - 1 : i - 1];
    right = u[i == n - 1 ? 0 : i + 1];
  } else {
    left = i == 0 ? gl : u[i - 1];
    right = i == n - 1 ? gr : u[i + 1];
  }
  return scale * ((left - u[i]) + (right - u[i]));
}

inline double window_node(const double* g, Index n, Index i, Index m, double h, bool periodic, double ol,
                          double orr) {
  auto at = [&](Index j) {
    if (periodic) return g[wrap(j, n)];
    if (j < 0) return ol;
    if (j >= n) return orr;
    return g[j];
  };
  if (m == 0) return 0.0;
  double s = 0.5 * at(i - m);
  for (Index j = i - m + 1; j < i + m; ++j) s += at(j);
  s += 0.5 * at(i + m);
  return h * s;
}

struct PeriodicPlan {
  std::vector<double> folded;
  const double* w;
  Index k_lo;
  Index count;
};

PeriodicPlan make_periodic_plan(const KernelWeights& weights, Index n) {
  PeriodicPlan plan;
  if (static_cast<Index>(weights.w.size()) > n) {
    plan.folded = fold_periodic(weights, static_cast<std::size_t>(n));
    plan.w = plan.folded.data();
    plan.k_lo = 0;
    plan.count = n;
  } else {
    plan.w = weights.w.data();
    plan.k_lo = weights.k_lo();
    plan.count = static_cast<Index>(weights.w.size());
  }
  return plan;
}

}  // namespace

std::vector<double> fold_periodic(const KernelWeights& weights, std::size_t n) {
  std::vector<double> f(n, 0.0);
  const Index nn = static_cast<Index>(n);
  for (Index k = weights.k_lo(); k <= weights.k_hi(); ++k) f[static_cast<std::size_t>(wrap(k, nn))] += weights.at(static_cast<int>(k));
  return f;
}

void convolve_periodic(const KernelWeights& weights, std::span<const double> v, std::span<double> out) {
  const Index n = static_cast<Index>(v.size());
  const PeriodicPlan plan = make_periodic_plan(weights, n);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) out[i] = periodic_node(plan.w, plan.k_lo, plan.count, v.data(), n, i);
}

void convolve_linear(const KernelWeights& weights, std::span<const double> v, std::span<double> out) {
  const Index n = static_cast<Index>(v.size());
  const Index k_lo = weights.k_lo();
  const Index k_hi = weights.k_hi();
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) out[i] = linear_node(weights.w.data(), k_lo, k_hi, v.data(), n, i);
}

void clamped_power(std::span<const double> u, double p, std::span<double> out) {
  const Index n = static_cast<Index>(u.size());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) out[i] = power_node(u[i], p);
}

void laplacian(std::span<const double> u, double h, double coefficient, bool periodic, double ghost_left,
               double ghost_right, std::span<double> out) {
  const Index n = static_cast<Index>(u.size());
  const double scale = coefficient / (h * h);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) out[i] = laplacian_node(u.data(), n, i, scale, periodic, ghost_left, ghost_right);
}

void add_reaction(std::span<const double> u, std::span<const double> conv, double alpha, double mu, double kappa,
                  std::span<double> out) {
  const Index n = static_cast<Index>(u.size());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) out[i] += mu * power_node(u[i], alpha) * (1.0 - kappa * conv[i]);
}

void window_trapezoid(std::span<const double> g, int half_width, double h, bool periodic, double outside_left,
                      double outside_right, std::span<double> out) {
  const Index n = static_cast<Index>(g.size());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i)
    out[i] = window_node(g.data(), n, i, half_width, h, periodic, outside_left, outside_right);
}

namespace serial {

void convolve_periodic(const KernelWeights& weights, std::span<const double> v, std::span<double> out) {
  const Index n = static_cast<Index>(v.size());
  const PeriodicPlan plan = make_periodic_plan(weights, n);
  for (Index i = 0; i < n; ++i) out[i] = periodic_node(plan.w, plan.k_lo, plan.count, v.data(), n, i);
}

void convolve_linear(const KernelWeights& weights, std::span<const double> v, std::span<double> out) {
  const Index n = static_cast<Index>(v.size());
  for (Index i = 0; i < n; ++i) out[i] = linear_node(weights.w.data(), weights.k_lo(), weights.k_hi(), v.data(), n, i);
}

void clamped_power(std::span<const double> u, double p, std::span<double> out) {
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = power_node(u[i], p);
}

void laplacian(std::span<const double> u, double h, double coefficient, bool periodic, double ghost_left,
               double ghost_right, std::span<double> out) {
  const Index n = static_cast<Index>(u.size());
  const double scale = coefficient / (h * h);
  for (Index i = 0; i < n; ++i) out[i] = laplacian_node(u.data(), n, i, scale, periodic, ghost_left, ghost_right);
}

void add_reaction(std::span<const double> u, std::span<const double> conv, double alpha, double mu, double kappa,
                  std::span<double> out) {
  for (std::size_t i = 0; i < u.size(); ++i) out[i] += mu * power_node(u[i], alpha) * (1.0 - kappa * conv[i]);
}

void window_trapezoid(std::span<const double> g, int half_width, double h, bool periodic, double outside_left,
                      double outside_right, std::span<double> out) {
  const Index n = static_cast<Index>(g.size());
  for (Index i = 0; i < n; ++i)
    out[i] = window_node(g.data(), n, i, half_width, h, periodic, outside_left, outside_right);
}

}  // namespace serial

}  // namespace nlfkpp::kernels
