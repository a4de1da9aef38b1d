#include "fsl/spectral_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace fsl {

void SpectralData::validate() const {
  require_input(!lambda.empty(), "spectrum: needs at least one mode");
  require_input(lambda.size() == s.size(),
                "spectrum: lambda and s must have equal length");
  double prev = 0;
  for (size_t i = 0; i < lambda.size(); ++i) {
    require_input(std::isfinite(lambda[i]) && lambda[i] > 0,
                  "spectrum: eigenvalues must be positive and finite");
    require_input(lambda[i] >= prev, "spectrum: eigenvalues must be ascending");
    require_input(std::isfinite(s[i]) && s[i] >= 0,
                  "spectrum: noise coefficients must be nonnegative");
    prev = lambda[i];
  }
  if (tail) {
    require_input(tail->a > 0 && tail->p > 0 && tail->b >= 0,
                  "spectrum: tail law needs a > 0, p > 0, b >= 0");
  }
}

ConditionReport check_noise_regularity(const SpectralData& spec, double delta) {
  spec.validate();
  require_input(delta > 0 && delta < 1,
                "noise regularity: delta must lie in (0,1)");
  ConditionReport rep;
  rep.eps_max = delta / (1.0 - delta);
  for (size_t i = 0; i < spec.lambda.size(); ++i)
    rep.partial_sum +=
        spec.s[i] * spec.s[i] / std::pow(spec.lambda[i], 1.0 - delta);
  rep.pass = true;
  rep.detail = "explicit spectrum";
  if (spec.tail) {
    const auto& t = *spec.tail;
    const double expo = 2.0 * t.q - t.p * (1.0 - delta);
    if (expo < -1.0) {
      // sum_{i>N} i^expo <= integral_N^inf x^expo dx = -N^(expo+1)/(expo+1)
      const double n0 = double(spec.n_modes());
      rep.tail_bound = t.b * t.b / std::pow(t.a, 1.0 - delta) *
                       std::pow(n0, expo + 1.0) / (-expo - 1.0);
      rep.detail = "tail exponent " + std::to_string(expo);
    } else {
      rep.tail_bound = std::numeric_limits<double>::infinity();
      rep.pass = false;
      rep.detail = "tail series diverges (exponent >= -1)";
    }
  }
  rep.value = rep.partial_sum + rep.tail_bound;
  return rep;
}

RateResult compute_rate_lambda(double lambda1, double L, double r0) {
  require_input(std::isfinite(lambda1) && lambda1 > 0,
                "rate: lambda1 must be positive");
  require_input(std::isfinite(L) && L >= 0, "rate: L must be nonnegative");
  require_input(std::isfinite(r0) && r0 >= 0, "rate: r0 must be nonnegative");
  const auto f = [&](double sv) { return sv - L * std::exp(sv * r0); };

  double s_hat;
  if (L * r0 == 0.0) {
    // f is monotone increasing; grid scan kept as a guard for the
    // degenerate parameterisation of the stationary point.
    const int n = 10000;
    s_hat = lambda1;
    double best = f(s_hat);
    for (int i = 1; i < n; ++i) {
      const double sv = lambda1 * double(i) / n;
      const double fv = f(sv);
      if (fv > best) {
        best = fv;
        s_hat = sv;
      }
    }
  } else {
    const double s_star = std::log(1.0 / (L * r0)) / r0;
    // sup over (0,lambda1] equals the max over the closure; the left
    // edge is reported as lambda1*1e-12 so argmax stays inside the
    // half-open interval while f(argmax) matches the limit value.
    s_hat = std::clamp(s_star, lambda1 * 1e-12, lambda1);
  }
  const double rate = f(s_hat);
  return {rate, s_hat, rate > 0};
}

double compute_lambda_prime(double delta, double K1, double K2, double B_norm) {
  require_input(delta >= 0 && K1 >= 0 && K2 >= 0 && B_norm >= 0,
                "lambda': parameters must be nonnegative");
  const double disc =
      std::sqrt((K2 - delta) * (K2 - delta) + 4.0 * K1 * B_norm);
  return 0.5 * (delta + K2 + disc);
}

double compute_alpha(double delta, double K1, double K2, double B_norm) {
  require_input(delta >= 0 && K1 >= 0 && K2 >= 0,
                "alpha: parameters must be nonnegative");
  require_input(B_norm > 0, "alpha: operator norm of B must be positive");
  const double disc =
      std::sqrt((K2 - delta) * (K2 - delta) + 4.0 * K1 * B_norm);
  // (delta - K2 + disc)/(2|B|) cancels badly when K2 >= delta and
  // K1|B| is small; 2K1/(disc + K2 - delta) is the same root exactly.
  double alpha;
  if (K2 >= delta) {
    const double den = disc + (K2 - delta);
    alpha = den > 0 ? 2.0 * K1 / den : 0.0;
  } else {
    alpha = (delta - K2 + disc) / (2.0 * B_norm);
  }
  const double lp = 0.5 * (delta + K2 + disc);
  const double lhs1 = alpha * delta + K1, rhs1 = lp * alpha;
  const double lhs2 = alpha * B_norm + K2, rhs2 = lp;
  const double scale1 = std::max({std::abs(lhs1), std::abs(rhs1), 1e-300});
  const double scale2 = std::max({std::abs(lhs2), std::abs(rhs2), 1e-300});
  require_numeric(std::abs(lhs1 - rhs1) <= 1e-10 * scale1 &&
                      std::abs(lhs2 - rhs2) <= 1e-10 * scale2,
                  "alpha: weight identities violated beyond tolerance");
  return alpha;
}

GapReport check_degenerate_gap(double lambda_prime, double lambda1, double r0) {
  require_input(lambda_prime >= 0, "gap: lambda' must be nonnegative");
  const RateResult rr = compute_rate_lambda(lambda1, lambda_prime, r0);
  double sup_se;
  if (r0 == 0.0) {
    sup_se = lambda1;
  } else {
    const double sg = std::min(1.0 / r0, lambda1);
    sup_se = sg * std::exp(-sg * r0);
  }
  return {rr.positive, rr.rate, rr.argmax_s, sup_se, lambda_prime};
}

DirichletBound dirichlet_lower_bound(int d, double R, double alpha) {
  require_input(d >= 1, "dirichlet: dimension must be >= 1");
  require_input(std::isfinite(R) && R > 0, "dirichlet: radius must be positive");
  require_input(std::isfinite(alpha) && alpha > 0,
                "dirichlet: alpha must be positive");
  const double pi2 = std::numbers::pi * std::numbers::pi;
  return {std::pow(double(d) * pi2, alpha) / std::pow(R, 2.0 * alpha),
          alpha > 0.5 * double(d)};
}

}  // namespace fsl
