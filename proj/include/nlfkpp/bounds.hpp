#pragma once

// Explicit a-priori bound constants for global boundedness, and the chained
// linear-ODE iteration bound behind them.

#include <optional>
#include <string>
#include <vector>

#include "nlfkpp/core_model.hpp"

namespace nlfkpp {

/// 1 + beta for N <= 2, 1 + 2 beta / N otherwise.
double critical_alpha(int N, double beta);

/// Sobolev exponent 2N/(N-2); +infinity for N <= 2.
double critical_s(int N);

struct BoundInputs {
  int N = 1;
  double alpha = 1.0;
  double beta = 1.0;
  double kappa = 1.0;
  double delta0 = 0.5;
  double eta = 0.49;
  double G = 1.0;  // Sobolev constant G(s*, N); not known in closed form
  double K = 2.0;
  double u0_sup = 1.0;
  // Only needed for mu*: iteration anchor m, window half-width delta
  // (defaults to delta0 / 2) and Poincare constant C(N).
  std::optional<int> m;
  std::optional<double> delta;
  double poincare_C = 1.0;

  void validate() const;
};

struct BoundReport {
  BoundInputs inputs;
  double alpha_star = 0.0;
  double s_star = 0.0;  // +infinity for N <= 2
  double A = 0.0;
  double exponent = 0.0;
  double M = 0.0;
  std::optional<double> mu_star;
  std::string mu_star_note;
};

/// Constants at the critical Sobolev exponent, using the s -> infinity limit
/// expressions for N <= 2. Throws ConfigError outside 1 <= alpha < alpha*.
BoundReport bound_M(const BoundInputs& in);

/// Same formulas evaluated at a finite exponent s > 2, with no limits taken.
/// Used to check the limit expressions against the general ones.
BoundReport bound_M_at(const BoundInputs& in, double s);

/// Proof constant C_1 = 2 S (1 + 2 P) for window half-width delta.
double sobolev_C1(int N, double s, double delta, double G, double poincare_C);

struct IterationProblem {
  std::vector<double> c;  // c[k] for k = 0 .. k_max, each > 0
  double a_bar = 1.0;     // A_k = a_bar * 2^(D_exp k), a_bar >= 1
  double D_exp = 1.0;
  double K_init = 1.0;    // y_k(0) <= K_init^(2^k)
  int m = 1;
  double y_m_minus_1_sup = 1.0;

  void validate() const;
  double A(int k) const;
};

/// Raised when the bound does not fit in a double; carries its log2.
class BoundOverflow : public Error {
 public:
  BoundOverflow(double log2_value);
  double log2_value() const { return log2_value_; }

 private:
  double log2_value_;
};

/// log2 of the closed-form bound on y_k for k >= m.
double iteration_bound_log2(const IterationProblem& p, int k);
/// The bound itself; throws BoundOverflow when it exceeds the double range.
double iteration_bound(const IterationProblem& p, int k);

/// Exponent of 2^D in the bound: sum_{i=0}^{k-m} (k - i) 2^i in closed form.
double iteration_D_power(int k, int m);

struct LemmaReport {
  bool passed = true;
  double worst_ratio = 0.0;  // max over levels and samples of y_k(t) / bound(k)
  int worst_k = 0;
  double worst_t = 0.0;
  std::size_t samples = 0;
};

/// Integrates y_k' = c_k (A_k max{1, sup y_{k-1}^2} - y_k), y_k(0) = K^(2^k),
/// for k = m .. k_max with RK4 (y_{m-1} held at its sup) and compares every
/// sample against iteration_bound.
LemmaReport verify_lemma(const IterationProblem& p, int k_max, double t_max);

}  // namespace nlfkpp
