#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "fsl/ergodics.hpp"
#include "fsl/errors.hpp"

using namespace fsl;

namespace {

CouplingRecord synthetic_record(double rate, double scale, int n,
                                double dt = 0.1) {
  CouplingRecord rec;
  rec.initial_gap_x = scale;
  for (int k = 0; k <= n; ++k) {
    const double t = k * dt;
    rec.t.push_back(t);
    rec.gap_x.push_back(scale * std::exp(-rate * t));
  }
  return rec;
}

NondegenerateModel scalar_model(double gain, double r0 = 1.0, int m = 16) {
  NondegenerateModel model;
  model.spec.lambda = {1.0};
  model.spec.s = {1.0};
  model.grid = SegmentGrid{r0, m};
  if (gain == 0) {
    model.drift.form = ZeroDrift{};
    model.drift.L = 0;
  } else {
    DistributedDelayDrift dd;
    dd.atom_nodes = {m};  // theta = 0
    dd.weights = {1.0};
    dd.gain = gain;
    model.drift.form = dd;
    model.drift.L = gain;
  }
  model.validate();
  return model;
}

DegenerateModel scalar_pair_model(int m = 32) {
  DegenerateModel model;
  model.A1 = Eigen::MatrixXd::Constant(1, 1, -1.0);
  model.B = Eigen::MatrixXd::Constant(1, 1, 1.0);
  model.A0 = Eigen::MatrixXd::Zero(1, 1);
  model.spec2.lambda = {1.0};
  model.spec2.s = {1.0};
  model.sigma_inv = {1.0};
  model.delta = 0.05;
  model.grid = SegmentGrid{0.5, m};
  Tanh2Drift tanh;
  tanh.C1 = Eigen::MatrixXd::Constant(1, 1, 0.1);
  tanh.d1 = resolve_delay_node(0.25, model.grid);
  tanh.C2 = Eigen::MatrixXd::Constant(1, 1, 0.05);
  tanh.d2 = 0;
  model.drift.form = tanh;
  model.drift.K1 = 0.1;
  model.drift.K2 = 0.05;
  model.validate();
  return model;
}

}  // namespace

TEST_CASE("rate fit recovers an exact exponential") {
  const std::vector<CouplingRecord> recs = {synthetic_record(0.7, 3.0, 80)};
  const auto fit = fit_contraction_rate(recs, 0.0, 0.7);
  CHECK(fit.fitted_rate == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.relative_gap == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(fit.points_used == 81);
  CHECK_FALSE(fit.floor_hit);
}

TEST_CASE("rate fit averages records and weights two-block gaps") {
  // Two records with equal grids; two-block series alpha*gx + gy.
  CouplingRecord a = synthetic_record(1.0, 1.0, 50);
  a.gap_y = a.gap_x;
  for (auto& g : a.gap_y) g *= 2.0;  // gy = 2 e^{-t}
  a.initial_gap_y = 2.0;
  CouplingRecord b = a;
  const auto fit = fit_contraction_rate({a, b}, 0.0, 1.0, 0.5);
  // 0.5 e^{-t} + 2 e^{-t} decays at exactly rate 1.
  CHECK(fit.fitted_rate == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rate fit drops the transient and floor points") {
  auto rec = synthetic_record(0.5, 1.0, 60);
  // Corrupt the early points; t_min must exclude them.
  for (size_t i = 0; i < rec.t.size(); ++i)
    if (rec.t[i] < 1.0) rec.gap_x[i] = 5.0;
  const auto fit = fit_contraction_rate({rec}, 1.0, 0.5);
  CHECK(fit.fitted_rate == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(fit.points_used == 51);

  // Dead-exact zeros past some time are floored out, not logged.
  auto hit = synthetic_record(0.5, 1.0, 60);
  for (size_t i = 0; i < hit.t.size(); ++i)
    if (hit.t[i] > 4.0) hit.gap_x[i] = 0.0;
  const auto ff = fit_contraction_rate({hit}, 0.0, 0.5);
  CHECK(ff.floor_hit);
  CHECK(ff.fitted_rate == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("rate fit input validation") {
  CHECK_THROWS_AS(fit_contraction_rate({}, 0.0, 1.0), input_error);
  auto rec = synthetic_record(1.0, 1.0, 10);
  auto other = synthetic_record(1.0, 1.0, 12);
  CHECK_THROWS_AS(fit_contraction_rate({rec, other}, 0.0, 1.0), input_error);
  // Zero initial gap cannot anchor a decay fit.
  auto flat = synthetic_record(1.0, 0.0, 10);
  CHECK_THROWS_AS(fit_contraction_rate({flat}, 0.0, 1.0), input_error);
}

TEST_CASE("synchronous coupling decays at the analytic rate") {
  // End-to-end: average coupled gaps, fit, compare against the
  // checker's rate.  The fitted decay may only beat the guarantee.
  const auto model = scalar_model(0.05);
  const double rate = model.rate().rate;
  REQUIRE(rate == doctest::Approx(1.0 - 0.05 * std::exp(1.0)).epsilon(1e-12));

  std::vector<CouplingRecord> recs;
  const Segment xi(model.grid, 1);
  const Segment eta =
      Segment::constant(model.grid, Eigen::VectorXd::Constant(1, 1.0));
  for (uint32_t p = 0; p < 4; ++p)
    recs.push_back(synchronous_couple(model, xi, eta, 8.0, 42, p));
  const auto fit = fit_contraction_rate(recs, model.grid.r0, rate);
  CHECK(fit.fitted_rate >= 0.8 * rate);
  CHECK(fit.r_squared > 0.95);
}

TEST_CASE("concentration table exponent zero is exact") {
  const auto model = scalar_model(0);
  const auto tbl = estimate_concentration(model, {0.0, 0.1, 0.25}, {1.0, 2.0},
                                          400, 11, 1);
  REQUIRE(tbl.mean.rows() == 2);
  REQUIRE(tbl.mean.cols() == 3);
  for (int r = 0; r < 2; ++r) {
    CHECK(tbl.mean(r, 0) == 1.0);
    CHECK(tbl.se(r, 0) == 0.0);
    CHECK_FALSE(tbl.overflow[r][0]);
    // exp(eps sup^2) grows with eps path by path, hence in the mean.
    CHECK(tbl.mean(r, 1) > 1.0);
    CHECK(tbl.mean(r, 2) > tbl.mean(r, 1));
  }
  CHECK(tbl.M == 400);
  CHECK(tbl.seed == 11);
}

TEST_CASE("concentration respects the stationary gaussian floor") {
  // sup over the window dominates |X(t)|, and for the driftless mode
  // E exp(eps X(t)^2) = (1 - 2 eps v_t)^{-1/2} exactly.
  const auto model = scalar_model(0);
  const double eps = 0.25;
  const double t = 2.0;
  const auto tbl = estimate_concentration(model, {eps}, {t}, 2000, 123, 1);
  const double v_t = (1.0 - std::exp(-2.0 * t)) / 2.0;
  const double floor = 1.0 / std::sqrt(1.0 - 2.0 * eps * v_t);
  CHECK(tbl.mean(0, 0) + 3.0 * tbl.se(0, 0) >= floor);
}

TEST_CASE("two-start gap vanishes when the horizons match") {
  const auto model = scalar_model(0.05);
  const Segment xi(model.grid, 1);
  const auto est = w_cauchy_gap(model, xi, 2.0, 2.0, 16, 3);
  CHECK(est.mean_gap == 0.0);
  CHECK(est.se == 0.0);
  CHECK(est.t1 == 2.0);
  CHECK(est.t2 == 2.0);
}

TEST_CASE("two-start gap decays as the first horizon grows") {
  const auto model = scalar_model(0.05);
  const Segment xi(model.grid, 1);
  const double spread = 1.0;
  const auto early = w_cauchy_gap(model, xi, 1.0, 1.0 + spread, 400, 17);
  const auto late = w_cauchy_gap(model, xi, 5.0, 5.0 + spread, 400, 17);
  CHECK(early.mean_gap > 0);
  CHECK(late.mean_gap > 0);
  // Rate ~0.86 over 4 time units: two orders of magnitude.
  CHECK(late.mean_gap < 0.2 * early.mean_gap);
  CHECK(early.M == 400);
}

TEST_CASE("two-start gap is deterministic and validates input") {
  const auto model = scalar_model(0.05);
  const Segment xi(model.grid, 1);
  const auto a = w_cauchy_gap(model, xi, 1.0, 2.0, 64, 5, 1);
  const auto b = w_cauchy_gap(model, xi, 1.0, 2.0, 64, 5, 3);
  CHECK(a.mean_gap == b.mean_gap);
  CHECK(a.se == b.se);
  CHECK_THROWS_AS(w_cauchy_gap(model, xi, 3.0, 2.0, 8, 5), input_error);
}

TEST_CASE("degenerate two-start gap uses the weighted metric") {
  const auto model = scalar_pair_model();
  const DegState init{Segment(model.grid, 1), Segment(model.grid, 1)};
  const auto same = w_cauchy_gap(model, init, 1.0, 1.0, 16, 9);
  CHECK(same.mean_gap == 0.0);

  const auto gap = w_cauchy_gap(model, init, 1.0, 2.0, 64, 9);
  CHECK(gap.mean_gap > 0);
  CHECK(gap.se >= 0);
  const auto rerun = w_cauchy_gap(model, init, 1.0, 2.0, 64, 9, 2);
  CHECK(gap.mean_gap == rerun.mean_gap);
}

TEST_CASE("invariant sampling matches the stationary law") {
  const auto model = scalar_model(0);
  const int64_t M = 800;
  const auto inv = sample_invariant(model, 5.0, M, 0.25, 21);
  CHECK(inv.M == M);
  CHECK(inv.burn_in == 5.0);
  // theta = 0 coordinate is N(0, 1/2) at stationarity.
  const double sd_mean = std::sqrt(0.5 / double(M));
  CHECK(std::abs(inv.coord_mean[0]) < 4 * sd_mean);
  CHECK(std::abs(inv.coord_var[0] - 0.5) < 4 * 0.5 * std::sqrt(2.0 / double(M)));
  CHECK(inv.sup_mean > 0);
  CHECK(inv.sup_var > 0);
  CHECK_FALSE(inv.exp_overflow);
  // E exp(eps X^2) = (1 - 2*0.25*0.5)^{-1/2} = sqrt(4/3) for the
  // point value; the window supremum can only raise it.
  CHECK(inv.exp_moment + 3 * inv.exp_moment_se >= std::sqrt(4.0 / 3.0));
  CHECK(inv.eps == 0.25);
}

TEST_CASE("invariant sampling defaults the burn-in from the rate") {
  const auto model = scalar_model(0.05);
  const auto inv = sample_invariant(model, 0.0, 16, 0.0, 2);
  const double rate = model.rate().rate;
  // 10/rate rounded up to the step grid.
  CHECK(inv.burn_in >= 10.0 / rate);
  CHECK(inv.burn_in <= 10.0 / rate + model.grid.dt());

  // Without a positive rate there is no defensible default.
  const auto bad = scalar_model(1.0);
  REQUIRE_FALSE(bad.rate().positive);
  CHECK_THROWS_AS(sample_invariant(bad, 0.0, 16, 0.0, 2), input_error);
}
