#pragma once

// Spectral description of the linear part and the closed-form
// condition checkers built on it.
//
//   - noise regularity: sum_i s_i^2 / lambda_i^(1-delta) finite, with a
//     power-law tail test for truncated spectra;
//   - contraction rate: lambda = sup_{s in (0,lambda1]} (s - L e^{s r0});
//   - degenerate constants: lambda' and the weight alpha solving
//     alpha*delta + K1 = lambda'*alpha,  alpha*|B| + K2 = lambda';
//   - spectral-gap lower bound (d pi^2)^alpha / R^(2alpha) for a ball
//     of radius R in dimension d under a fractional power alpha.

#include <optional>
#include <string>
#include <vector>

#include "fsl/errors.hpp"

namespace fsl {

// lambda_i ~ a i^p, s_i ~ b i^q for modes beyond the explicit list.
struct TailLaw {
  double a = 1;
  double p = 2;
  double b = 1;
  double q = 0;
};

// Eigenvalues (ascending, positive) of the negative generator and the
// per-mode noise coefficients |sigma* e_i|.
struct SpectralData {
  std::vector<double> lambda;
  std::vector<double> s;
  std::optional<TailLaw> tail;

  int n_modes() const { return int(lambda.size()); }
  void validate() const;
};

struct ConditionReport {
  bool pass = false;
  double value = 0;        // partial sum plus tail bound (if any)
  double partial_sum = 0;  // over explicit modes
  double tail_bound = 0;   // integral bound on the omitted tail; inf if divergent
  double eps_max = 0;      // admissible exponent range is (0, eps_max]
  std::string detail;
};

// delta in (0,1).  With a tail law, the series converges iff
// 2q - p(1-delta) < -1; the omitted tail is bounded by the integral.
ConditionReport check_noise_regularity(const SpectralData& spec, double delta);

struct RateResult {
  double rate = 0;
  double argmax_s = 0;  // in (0, lambda1]
  bool positive = false;
};

// sup and argmax of f(s) = s - L e^{s r0} over (0, lambda1].  f is
// concave for L,r0 > 0; the stationary point log(1/(L r0))/r0 is
// clamped to the interval.  When L*r0 = 0 the log form degenerates and
// a 1e4-point grid scan stands in (f is monotone there).
RateResult compute_rate_lambda(double lambda1, double L, double r0);

// lambda' = (delta + K2 + sqrt((K2-delta)^2 + 4 K1 |B|)) / 2.
double compute_lambda_prime(double delta, double K1, double K2, double B_norm);

// Positive root alpha of |B| a^2 + (K2 - delta) a - K1 = 0, evaluated
// in the cancellation-free form; postcondition enforces the two
// identities linking alpha and lambda' to 1e-10 relative.
double compute_alpha(double delta, double K1, double K2, double B_norm);

struct GapReport {
  bool pass = false;       // lambda' < sup s e^{-s r0}, i.e. rate > 0
  double rate = 0;         // sup (s - lambda' e^{s r0})
  double argmax_s = 0;
  double sup_se = 0;       // sup_{s in (0,lambda1]} s e^{-s r0}
  double lambda_prime = 0;
};
GapReport check_degenerate_gap(double lambda_prime, double lambda1, double r0);

struct DirichletBound {
  double value = 0;  // (d pi^2)^alpha / R^(2 alpha)
  bool pass = false; // alpha > d/2 (otherwise the mode series log-diverges)
};
DirichletBound dirichlet_lower_bound(int d, double R, double alpha);

}  // namespace fsl
