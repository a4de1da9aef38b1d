#pragma once

// Gaussian supremum tail machinery.
//
// One-dimensional form: for a centred Gaussian process on [0,1] with
// pointwise deviation bound Gamma and entropy-modulus integral theta1,
//   P( max|gamma| >= r (Gamma + (2+sqrt 2) theta1) )
//     <= (5e/2) int_r^inf e^{-s^2/2} ds        for r >= sqrt 5;
// below sqrt 5 the bound is vacuous (reported as 1 with a flag).
//
// Mode-sum form for the stochastic convolution on a delay window of
// span r0: per-mode scales
//   Gamma_i <= s_i / sqrt(2 lambda_i),
//   phi_i(r) <= c_i r^{delta/4},  c_i = sqrt(c1) s_i lambda_i^{delta/4 - 1/2},
//   c1 = c(delta/4)^2 r0^{delta/2}/2 + c(delta/2) (2 r0)^{delta/2}/2,
// with c(r) = sup_{u>0} (1-e^{-u})/u^r, then
//   delta_i = Gamma_i + (2+sqrt 2) c_i int_1^inf e^{-(delta/4)s^2} ds,
//   theta   = sum delta_i^2 log(e + 1/delta_i),
//   ltilde  = min_i log(e + 1/delta_i) / (2 theta),
// and for 0 < lam < ltilde and r^2 >= 5 theta ltilde/(ltilde - lam):
//   P( sup >= r ) <= (sqrt 5 e / 2) e^{-lam r^2}
//                    sum_i exp(-r^2 (log(e+1/delta_i)/(2 theta) - lam)).
// Modes with delta_i = 0 contribute nothing to theta or the sum and are
// excluded from the ltilde minimum.

#include <vector>

#include "fsl/segment.hpp"
#include "fsl/spectral_model.hpp"

namespace fsl {

// c(r) = sup_{u>0} (1 - e^{-u}) / u^r for r in (0,1); golden-section
// maximised to 1e-10 and cached per exponent.
double hoelder_c(double r);

// int_r^inf e^{-s^2/2} ds.
double gauss_tail(double r);

struct FernBound {
  double value = 1;    // probability bound, 1 when vacuous
  double level = 0;    // threshold r * (Gamma + (2+sqrt2) theta1)
  bool vacuous = true; // r < sqrt 5
};
FernBound one_dim_fernique_bound(double Gamma, double theta1, double r);

struct FerniqueCoeffs {
  std::vector<double> gamma;    // Gamma_i
  std::vector<double> c_env;    // c_i
  double env_exponent = 0;      // delta/4
  std::vector<double> delta_i;
  double theta = 0;             // explicit + tail bound
  double theta_explicit = 0;
  double theta_tail_bound = 0;
  bool theta_finite = true;     // tail-law series test
  double lambda_tilde = 0;      // +inf sentinel when all delta_i = 0
  double hoelder_c1 = 0;
};

FerniqueCoeffs compute_coeffs(const SpectralData& spec, double delta, double r0,
                              double t0);

// Test hook: build the aggregate quantities from given delta_i.
FerniqueCoeffs coeffs_from_deltas(const std::vector<double>& deltas);

struct TailBoundValue {
  double value = 1;
  bool below_threshold = true;
  double r_threshold = 0;  // sqrt(5 theta ltilde / (ltilde - lam))
};
TailBoundValue tail_bound(const FerniqueCoeffs& coeffs, double lam, double r);

struct TailReport {
  std::vector<double> r;
  std::vector<int64_t> count;        // exceedances among M suprema
  std::vector<double> p_hat;
  std::vector<double> wilson_upper;  // 95% upper confidence bound
  std::vector<double> bound;
  int64_t M = 0;
  double lam = 0;
  // Domination verdicts over grid points with bound < 1:
  bool verdict_point = true;   // p_hat <= bound everywhere
  bool verdict_wilson = true;  // wilson_upper <= bound everywhere
};

// Simulates M window suprema of the truncated stochastic convolution
// and compares the empirical tail with the mode-sum bound at lam.
TailReport empirical_sup_tail(const SpectralData& spec, double delta, double t0,
                              const SegmentGrid& grid, int64_t M,
                              const std::vector<double>& r_grid, double lam,
                              uint64_t seed, int workers);

double wilson_upper_bound(int64_t count, int64_t M);

}  // namespace fsl
