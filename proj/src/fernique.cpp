#include "fsl/fernique.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include "fsl/linalg.hpp"
#include "fsl/parallel.hpp"
#include "fsl/simulate.hpp"

namespace fsl {

namespace {
constexpr double kE = std::numbers::e;
constexpr double kSqrt5 = 2.23606797749978969;
constexpr double kTwoPlusSqrt2 = 3.41421356237309505;

// int_1^inf e^{-a s^2} ds = sqrt(pi/a)/2 * erfc(sqrt(a))
double gauss_env_integral(double a) {
  require_input(a > 0, "envelope integral: exponent must be positive");
  return 0.5 * std::sqrt(std::numbers::pi / a) * std::erfc(std::sqrt(a));
}

// theta summand; the delta -> 0 limit is 0.
double theta_term(double d) {
  return d > 0 ? d * d * std::log(kE + 1.0 / d) : 0.0;
}

// int_N^inf x^a dx and int_N^inf x^a ln(x) dx for a < -1.
double power_tail(double N, double a) {
  return -std::pow(N, a + 1.0) / (a + 1.0);
}
double power_log_tail(double N, double a) {
  const double ap1 = a + 1.0;
  return std::pow(N, ap1) * (1.0 / (ap1 * ap1) - std::log(N) / ap1);
}
}  // namespace

double hoelder_c(double r) {
  require_input(r > 0 && r < 1, "hoelder_c: exponent must lie in (0,1)");
  static std::map<double, double> cache;
  static std::mutex mu;
  {
    std::scoped_lock lk(mu);
    if (auto it = cache.find(r); it != cache.end()) return it->second;
  }
  const auto g = [r](double lu) {
    const double u = std::exp(lu);
    return -std::expm1(-u) / std::pow(u, r);
  };
  // coarse scan in log u, then golden section on the bracketing cell
  const double lo = std::log(1e-8), hi = std::log(1e8);
  const int n = 400;
  int best = 0;
  double best_v = g(lo);
  for (int i = 1; i <= n; ++i) {
    const double v = g(lo + (hi - lo) * i / n);
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  const double a = lo + (hi - lo) * std::max(0, best - 1) / n;
  const double b = lo + (hi - lo) * std::min(n, best + 1) / n;
  const double lu = linalg::golden_max(g, a, b, 1e-10);
  const double c = g(lu);
  std::scoped_lock lk(mu);
  cache.emplace(r, c);
  return c;
}

double gauss_tail(double r) {
  return std::sqrt(std::numbers::pi / 2.0) * std::erfc(r / std::sqrt(2.0));
}

FernBound one_dim_fernique_bound(double Gamma, double theta1, double r) {
  require_input(Gamma >= 0 && theta1 >= 0 && r >= 0,
                "fernique bound: inputs must be nonnegative");
  FernBound out;
  out.level = r * (Gamma + kTwoPlusSqrt2 * theta1);
  out.vacuous = r < kSqrt5;
  out.value = out.vacuous ? 1.0 : std::min(1.0, 2.5 * kE * gauss_tail(r));
  return out;
}

FerniqueCoeffs compute_coeffs(const SpectralData& spec, double delta, double r0,
                              double t0) {
  spec.validate();
  require_input(delta > 0 && delta < 1, "fernique: delta must lie in (0,1)");
  require_input(r0 > 0, "fernique: r0 must be positive");
  require_input(t0 >= r0, "fernique: t0 must cover the window, t0 >= r0");

  FerniqueCoeffs out;
  out.env_exponent = 0.25 * delta;
  const double c_q = hoelder_c(0.25 * delta);
  const double c_h = hoelder_c(0.5 * delta);
  out.hoelder_c1 = 0.5 * c_q * c_q * std::pow(r0, 0.5 * delta) +
                   0.5 * c_h * std::pow(2.0 * r0, 0.5 * delta);
  const double env_int = gauss_env_integral(0.25 * delta);
  const double sqrt_c1 = std::sqrt(out.hoelder_c1);

  const int n = spec.n_modes();
  out.gamma.resize(n);
  out.c_env.resize(n);
  out.delta_i.resize(n);
  for (int i = 0; i < n; ++i) {
    out.gamma[i] = spec.s[i] / std::sqrt(2.0 * spec.lambda[i]);
    out.c_env[i] =
        sqrt_c1 * spec.s[i] * std::pow(spec.lambda[i], 0.25 * delta - 0.5);
    out.delta_i[i] = out.gamma[i] + kTwoPlusSqrt2 * out.c_env[i] * env_int;
    out.theta_explicit += theta_term(out.delta_i[i]);
  }

  if (spec.tail) {
    // Envelope of delta_i beyond the explicit modes: two power terms
    //   D1 i^{e1} (the Gamma part) + D2 i^{e2} (the modulus part),
    // and sum delta^2 log(e+1/delta) is bounded with
    // (x+y)^2 <= 2x^2 + 2y^2 and log(e+uv) <= 1 + ln+(u) + ln+(v).
    const auto& t = *spec.tail;
    const double e1 = t.q - 0.5 * t.p;
    const double D1 = t.b / std::sqrt(2.0 * std::pow(t.a, 1.0));
    const double e2 = t.q - t.p * (0.5 - 0.25 * delta);
    const double D2 = kTwoPlusSqrt2 * env_int * sqrt_c1 * t.b /
                      std::pow(t.a, 0.5 - 0.25 * delta);
    const double e_max = std::max(e1, e2);
    if (2.0 * e_max < -1.0) {
      const double N = double(n);
      double tail = 0;
      for (auto [D, e] : {std::pair{D1, e1}, std::pair{D2, e2}}) {
        if (D <= 0) continue;
        const double logD = std::max(0.0, std::log(1.0 / D));
        tail += 2.0 * D * D *
                ((1.0 + logD) * power_tail(N, 2.0 * e) +
                 std::abs(e) * power_log_tail(N, 2.0 * e));
      }
      out.theta_tail_bound = tail;
    } else {
      out.theta_finite = false;
      out.theta_tail_bound = std::numeric_limits<double>::infinity();
    }
  }
  out.theta = out.theta_explicit + out.theta_tail_bound;

  double min_log = std::numeric_limits<double>::infinity();
  for (double d : out.delta_i)
    if (d > 0) min_log = std::min(min_log, std::log(kE + 1.0 / d));
  out.lambda_tilde = out.theta > 0
                         ? min_log / (2.0 * out.theta)
                         : std::numeric_limits<double>::infinity();
  return out;
}

FerniqueCoeffs coeffs_from_deltas(const std::vector<double>& deltas) {
  FerniqueCoeffs out;
  out.delta_i = deltas;
  for (double d : deltas) {
    require_input(d >= 0, "fernique: delta_i must be nonnegative");
    out.theta_explicit += theta_term(d);
  }
  out.theta = out.theta_explicit;
  double min_log = std::numeric_limits<double>::infinity();
  for (double d : deltas)
    if (d > 0) min_log = std::min(min_log, std::log(kE + 1.0 / d));
  out.lambda_tilde = out.theta > 0
                         ? min_log / (2.0 * out.theta)
                         : std::numeric_limits<double>::infinity();
  return out;
}

TailBoundValue tail_bound(const FerniqueCoeffs& coeffs, double lam, double r) {
  require_input(lam > 0 && lam < coeffs.lambda_tilde,
                "tail bound: lam must lie in (0, lambda_tilde)");
  require_input(r >= 0, "tail bound: r must be nonnegative");
  require_numeric(std::isfinite(coeffs.theta),
                  "tail bound: theta is not finite");
  TailBoundValue out;
  out.r_threshold = std::sqrt(5.0 * coeffs.theta * coeffs.lambda_tilde /
                              (coeffs.lambda_tilde - lam));
  if (r < out.r_threshold) return out;  // vacuous below the threshold
  out.below_threshold = false;
  const double r2 = r * r;
  double sum = 0;
  for (double d : coeffs.delta_i) {
    if (d <= 0) continue;
    const double li = std::log(kE + 1.0 / d);
    sum += std::exp(-r2 * (li / (2.0 * coeffs.theta) - lam));
  }
  out.value = 0.5 * kSqrt5 * kE * std::exp(-lam * r2) * sum;
  return out;
}

double wilson_upper_bound(int64_t count, int64_t M) {
  require_input(M > 0 && count >= 0 && count <= M,
                "wilson: need 0 <= count <= M");
  const double z = 1.959963984540054;  // 97.5% normal quantile
  const double z2 = z * z;
  const double p = double(count) / double(M);
  const double denom = 1.0 + z2 / double(M);
  const double centre = p + z2 / (2.0 * double(M));
  const double half =
      z * std::sqrt(p * (1.0 - p) / double(M) + z2 / (4.0 * double(M) * double(M)));
  return (centre + half) / denom;
}

TailReport empirical_sup_tail(const SpectralData& spec, double delta, double t0,
                              const SegmentGrid& grid, int64_t M,
                              const std::vector<double>& r_grid, double lam,
                              uint64_t seed, int workers) {
  require_input(M > 0, "empirical tail: M must be positive");
  require_input(!r_grid.empty(), "empirical tail: r grid must be nonempty");
  const FerniqueCoeffs coeffs = compute_coeffs(spec, delta, grid.r0, t0);

  std::vector<double> sups(static_cast<size_t>(M));
  parallel_for(M, workers, [&](int64_t k) {
    sups[size_t(k)] =
        stoch_conv_window_sup(spec, t0, grid, rng::PathNoise(seed, uint32_t(k)));
  });

  TailReport rep;
  rep.M = M;
  rep.lam = lam;
  rep.r = r_grid;
  for (double r : r_grid) {
    int64_t c = 0;
    for (double s : sups)
      if (s >= r) ++c;
    rep.count.push_back(c);
    rep.p_hat.push_back(double(c) / double(M));
    rep.wilson_upper.push_back(wilson_upper_bound(c, M));
    rep.bound.push_back(tail_bound(coeffs, lam, r).value);
  }
  for (size_t i = 0; i < rep.r.size(); ++i) {
    if (rep.bound[i] >= 1.0) continue;
    if (rep.p_hat[i] > rep.bound[i]) rep.verdict_point = false;
    if (rep.wilson_upper[i] > rep.bound[i]) rep.verdict_wilson = false;
  }
  return rep;
}

}  // namespace fsl
