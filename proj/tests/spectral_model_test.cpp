#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "fsl/errors.hpp"
#include "fsl/rng.hpp"
#include "fsl/spectral_model.hpp"
#include "oracles.hpp"

using fsl::SpectralData;
using fsl::TailLaw;

namespace {
SpectralData quadratic_modes(int n) {
  SpectralData spec;
  for (int i = 1; i <= n; ++i) {
    spec.lambda.push_back(double(i) * i);
    spec.s.push_back(1.0);
  }
  spec.tail = TailLaw{1, 2, 1, 0};
  return spec;
}
}  // namespace

TEST_CASE("noise sum with tail brackets the zeta value") {
  // lambda_i = i^2, s_i = 1, delta = 0.2: the full series is zeta(1.6).
  // The reported value appends an integral tail bound over the omitted
  // modes, so it lands in [zeta, zeta + N^-1.6].
  const int N = 50;
  const auto rep = fsl::check_noise_regularity(quadratic_modes(N), 0.2);
  CHECK(rep.pass);
  CHECK(rep.value >= oracle::kZeta16);
  CHECK(rep.value <= oracle::kZeta16 + std::pow(double(N), -1.6));
  CHECK(rep.partial_sum < oracle::kZeta16);
  CHECK(rep.tail_bound > 0);
  CHECK(rep.tail_bound < std::numeric_limits<double>::infinity());
}

TEST_CASE("noise sum admissible exponent boundary") {
  // p = 2, q = 0: convergence needs 2q - p(1-delta) < -1, i.e.
  // delta < 1/2.
  auto spec = quadratic_modes(10);
  const auto ok = fsl::check_noise_regularity(spec, 0.4);
  CHECK(ok.pass);
  // Exponent-moment range delivered by the finite sum: (0, d/(1-d)].
  CHECK(ok.eps_max == doctest::Approx(0.4 / 0.6).epsilon(1e-12));

  const auto bad = fsl::check_noise_regularity(spec, 0.6);
  CHECK_FALSE(bad.pass);
  CHECK(bad.tail_bound == std::numeric_limits<double>::infinity());
}

TEST_CASE("noise sum divergent tail law") {
  SpectralData spec;
  spec.lambda = {1.0};
  spec.s = {1.0};
  spec.tail = TailLaw{1, 1, 1, 0};  // 2q - p(1-delta) = -0.8 > -1
  const auto rep = fsl::check_noise_regularity(spec, 0.2);
  CHECK_FALSE(rep.pass);
}

TEST_CASE("contraction rate with the stationary point clamped") {
  const auto r = fsl::compute_rate_lambda(5, 1, 0.2);
  CHECK(r.rate == doctest::Approx(oracle::kRateClamped).epsilon(1e-12));
  CHECK(r.argmax_s == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(r.positive);
}

TEST_CASE("contraction rate with an interior stationary point") {
  // s* = ln(1/(L r0))/r0 = ln(10), value ln(10) - 1.
  const auto r = fsl::compute_rate_lambda(10, 0.1, 1);
  CHECK(r.rate == doctest::Approx(oracle::kRateInterior).epsilon(1e-12));
  CHECK(r.argmax_s == doctest::Approx(std::log(10.0)).epsilon(1e-9));
  CHECK(r.positive);
}

TEST_CASE("contraction rate oracle family") {
  CHECK(fsl::compute_rate_lambda(2, 0.5, 0.5).rate ==
        doctest::Approx(oracle::kRateHalfE).epsilon(1e-12));
  CHECK(fsl::compute_rate_lambda(1, 0.05, 1).rate ==
        doctest::Approx(oracle::kRateSmallL).epsilon(1e-12));
  CHECK(fsl::compute_rate_lambda(1, 0.2, 1).rate ==
        doctest::Approx(oracle::kRateFifthE).epsilon(1e-12));
}

TEST_CASE("contraction rate degenerate log cases") {
  // L = 0: f(s) = s, supremum at lambda1.
  const auto free = fsl::compute_rate_lambda(3, 0, 1);
  CHECK(free.rate == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(free.positive);

  // r0 = 0: f(s) = s - L.
  const auto nod = fsl::compute_rate_lambda(2, 0.5, 0);
  CHECK(nod.rate == doctest::Approx(1.5).epsilon(1e-6));

  // Strong drift: f < 0 everywhere on (0, lambda1].
  const auto neg = fsl::compute_rate_lambda(1, 3, 1);
  CHECK_FALSE(neg.positive);
  CHECK(neg.rate < 0);
}

TEST_CASE("contraction rate matches a brute-force grid search") {
  // Randomised agreement against an independent 1e5-point scan.
  fsl::rng::ScalarStream draw(314, 0);
  for (int trial = 0; trial < 25; ++trial) {
    const double l1 = draw.uniform(0.1, 10.0);
    const double L = draw.uniform(0.0, 5.0);
    const double r0 = draw.uniform(0.0, 2.0);
    const auto r = fsl::compute_rate_lambda(l1, L, r0);
    // sup over (0, lambda1] equals the max over the closure [0, lambda1]
    // by continuity, so the scan includes both endpoints.
    double best = -std::numeric_limits<double>::infinity();
    const int G = 100000;
    for (int k = 0; k <= G; ++k) {
      const double s = l1 * double(k) / G;
      best = std::max(best, s - L * std::exp(s * r0));
    }
    CHECK(r.rate == doctest::Approx(best).epsilon(1e-7));
  }
}

TEST_CASE("lambda prime and alpha solve their defining system") {
  CHECK(fsl::compute_lambda_prime(1, 1, 1, 4) ==
        doctest::Approx(3.0).epsilon(1e-13));
  CHECK(fsl::compute_alpha(1, 1, 1, 4) == doctest::Approx(0.5).epsilon(1e-13));

  fsl::rng::ScalarStream draw(99, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const double delta = draw.uniform(0.01, 3.0);
    const double K1 = draw.uniform(1e-6, 5.0);
    const double K2 = draw.uniform(0.0, 5.0);
    const double Bn = draw.uniform(1e-6, 5.0);
    const double lp = fsl::compute_lambda_prime(delta, K1, K2, Bn);
    const double a = fsl::compute_alpha(delta, K1, K2, Bn);
    CHECK(a > 0);
    CHECK(std::abs(a * delta + K1 - lp * a) <= 1e-10 * std::max(1.0, lp * a));
    CHECK(std::abs(a * Bn + K2 - lp) <= 1e-10 * std::max(1.0, lp));
  }
}

TEST_CASE("degenerate gap report") {
  // lambda' below sup s e^{-s r0}: on (0,1] with r0 = 0.5 the sup sits
  // at the right endpoint, e^{-1/2}.
  const double lp = 0.36622776601683793;
  const auto g = fsl::check_degenerate_gap(lp, 1.0, 0.5);
  CHECK(g.pass);
  CHECK(g.sup_se == doctest::Approx(std::exp(-0.5)).epsilon(1e-10));
  CHECK(g.lambda_prime == lp);
  // Boundary supremum: rate = lambda1 - lambda' e^{lambda1 r0}.
  CHECK(g.rate == doctest::Approx(1.0 - lp * std::exp(0.5)).epsilon(1e-10));
  CHECK(g.rate > 0);

  // Interior supremum of s e^{-s r0} at s = 1/r0.
  const auto wide = fsl::check_degenerate_gap(0.1, 10.0, 0.5);
  CHECK(wide.sup_se == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-10));
  CHECK(wide.pass);

  const auto fail = fsl::check_degenerate_gap(1.0, 1.0, 1.0);
  CHECK_FALSE(fail.pass);
  CHECK(fail.rate < 0);
}

TEST_CASE("spectral gap lower bound for a Dirichlet ball") {
  const auto d1 = fsl::dirichlet_lower_bound(1, 1, 1);
  CHECK(d1.value == doctest::Approx(oracle::kPiSq).epsilon(1e-13));
  CHECK(d1.pass);

  const auto d1a2 = fsl::dirichlet_lower_bound(1, 1, 2);
  CHECK(d1a2.value == doctest::Approx(oracle::kPiFourth).epsilon(1e-13));
  CHECK(d1a2.pass);

  // alpha = d/2 sits exactly on the divergence boundary.
  const auto d2 = fsl::dirichlet_lower_bound(2, 1, 1);
  CHECK(d2.value == doctest::Approx(oracle::kTwoPiSq).epsilon(1e-13));
  CHECK_FALSE(d2.pass);

  // Radius scaling R^(-2 alpha).
  const auto scaled = fsl::dirichlet_lower_bound(1, 2, 1);
  CHECK(scaled.value == doctest::Approx(oracle::kPiSq / 4).epsilon(1e-13));
}

TEST_CASE("spectral data validation") {
  SpectralData bad;
  bad.lambda = {2.0, 1.0};
  bad.s = {1.0, 1.0};
  CHECK_THROWS_AS(bad.validate(), fsl::input_error);

  SpectralData neg;
  neg.lambda = {-1.0};
  neg.s = {1.0};
  CHECK_THROWS_AS(neg.validate(), fsl::input_error);

  SpectralData mismatch;
  mismatch.lambda = {1.0, 2.0};
  mismatch.s = {1.0};
  CHECK_THROWS_AS(mismatch.validate(), fsl::input_error);

  CHECK_NOTHROW(quadratic_modes(4).validate());
}
