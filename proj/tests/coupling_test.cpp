#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "fsl/coupling.hpp"
#include "fsl/errors.hpp"

using namespace fsl;

namespace {

NondegenerateModel driftless(double lambda, double r0, int m) {
  NondegenerateModel model;
  model.spec.lambda = {lambda};
  model.spec.s = {1.0};
  model.grid = SegmentGrid{r0, m};
  model.drift.form = ZeroDrift{};
  model.drift.L = 0;
  model.validate();
  return model;
}

// Scalar hypoelliptic pair with a bounded two-argument drift.
DegenerateModel scalar_example(int m = 32) {
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

DegState constant_pair(const DegenerateModel& model, double x, double y) {
  return DegState{
      Segment::constant(model.grid, Eigen::VectorXd::Constant(1, x)),
      Segment::constant(model.grid, Eigen::VectorXd::Constant(1, y))};
}

}  // namespace

TEST_CASE("synchronous coupling cancels the noise exactly") {
  // Zero drift: the difference solves dD = -lambda D dt, so the
  // segment gap is |D0| on [0, r0) and e^{-(t-r0)}|D0| after.
  const auto model = driftless(1.0, 1.0, 32);
  const Segment xi(model.grid, 1);
  const Segment eta =
      Segment::constant(model.grid, Eigen::VectorXd::Constant(1, 0.5));
  const auto rec = synchronous_couple(model, xi, eta, 4.0, 123);
  REQUIRE(!rec.t.empty());
  CHECK(rec.initial_gap_x == doctest::Approx(0.5).epsilon(1e-15));
  for (size_t i = 0; i < rec.t.size(); ++i) {
    const double t = rec.t[i];
    const double expect = t < 1.0 ? 0.5 : 0.5 * std::exp(-(t - 1.0));
    CHECK(rec.gap_x[i] == doctest::Approx(expect).epsilon(1e-12));
  }
  // The decay bound e^{l1 r0} e^{-lambda t} |D0| is attained here, so
  // the worst ratio is exactly one.
  CHECK(rec.bound_checked);
  CHECK(rec.max_bound_ratio == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("synchronous coupling respects the decay bound with drift") {
  NondegenerateModel model;
  model.spec.lambda = {2.0};
  model.spec.s = {1.0};
  model.grid = SegmentGrid{0.5, 64};
  DistributedDelayDrift dd;
  dd.atom_nodes = {0, 32};
  dd.weights = {0.5, 0.5};
  dd.gain = 0.5;
  model.drift.form = dd;
  model.drift.L = 0.5;
  model.validate();
  REQUIRE(model.rate().positive);

  const Segment xi(model.grid, 1);
  const Segment eta =
      Segment::constant(model.grid, Eigen::VectorXd::Constant(1, 1.0));
  const auto rec = synchronous_couple(model, xi, eta, 6.0, 9);
  CHECK(rec.bound_checked);
  CHECK(rec.max_bound_ratio <= 1.0 + 10 * model.grid.dt());
}

TEST_CASE("degenerate synchronous coupling of identical states is null") {
  const auto model = scalar_example();
  const auto a = constant_pair(model, 0.3, -0.2);
  const auto b = constant_pair(model, 0.3, -0.2);
  const auto rec = synchronous_couple(model, a, b, 2.0, 77);
  REQUIRE(!rec.t.empty());
  REQUIRE(rec.gap_y.size() == rec.gap_x.size());
  for (size_t i = 0; i < rec.t.size(); ++i) {
    CHECK(rec.gap_x[i] == 0.0);
    CHECK(rec.gap_y[i] == 0.0);
  }
}

TEST_CASE("weighted gramian closed forms") {
  const auto model = scalar_example();
  // A0 = 0, B = 1: Qtilde(T) = int_0^T s(T-s) ds = T^3/6.
  const auto q1 = qtilde_matrix(model, 1.0);
  CHECK(q1(0, 0) == doctest::Approx(1.0 / 6.0).epsilon(1e-10));
  const auto q2 = qtilde_matrix(model, 2.0);
  CHECK(q2(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("weighted gramian with a nilpotent commutation generator") {
  // e^{sA0} = [[1, s], [0, 1]]; the integrand s(1-s) e^{sA0} B B^T
  // e^{sA0^T} integrates entrywise to [[13/60, 1/12], [1/12, 1/6]].
  DegenerateModel model;
  model.A1 = -Eigen::MatrixXd::Identity(2, 2);
  model.B = Eigen::MatrixXd::Identity(2, 2);
  model.A0 = Eigen::MatrixXd::Zero(2, 2);
  model.A0(0, 1) = 1.0;
  model.spec2.lambda = {1.0, 2.0};
  model.spec2.s = {1.0, 1.0};
  model.sigma_inv = {1.0, 1.0};
  model.delta = 0.05;
  model.grid = SegmentGrid{0.5, 8};
  model.drift.form = Zero2Drift{};
  model.validate();

  const auto q = qtilde_matrix(model, 1.0);
  CHECK(q(0, 0) == doctest::Approx(13.0 / 60.0).epsilon(1e-10));
  CHECK(q(0, 1) == doctest::Approx(1.0 / 12.0).epsilon(1e-10));
  CHECK(q(1, 0) == doctest::Approx(1.0 / 12.0).epsilon(1e-10));
  CHECK(q(1, 1) == doctest::Approx(1.0 / 6.0).epsilon(1e-10));
}

TEST_CASE("steering plan solves the scalar two-point problem") {
  const auto model = scalar_example(16);
  const double t0 = 1.5;  // T = 1

  // Pure X offset: e = -Qtilde^{-1} dxi0 = -6, h(t) = -6 t(1-t).
  const auto plan =
      build_plan(model, constant_pair(model, 0, 0), constant_pair(model, 1, 0), t0);
  CHECK(plan.T == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(plan.k_T == 32);
  CHECK(plan.n_steps == 48);
  CHECK(plan.e_vec[0] == doctest::Approx(-6.0).epsilon(1e-8));
  // Node 16 sits at t = 0.5.
  CHECK(plan.h_nodes(16, 0) == doctest::Approx(-1.5).epsilon(1e-8));
  CHECK(plan.u_nodes(16, 0) == doctest::Approx(-1.5).epsilon(1e-8));
  // delta_y = e^{tA2} u(t); delta_x(t) = e^{-t}(1 - 3t^2 + 2t^3).
  CHECK(plan.delta_y(16, 0) ==
        doctest::Approx(-1.5 * std::exp(-0.5)).epsilon(1e-8));
  CHECK(plan.delta_x(16, 0) ==
        doctest::Approx(std::exp(-0.5) * (1 - 3 * 0.25 + 2 * 0.125))
            .epsilon(1e-7));
  CHECK(plan.x_resid_after_T <= 1e-8);
  CHECK(plan.qtilde_cond == doctest::Approx(1.0).epsilon(1e-12));

  // Pure Y offset: e = -6 * int (1-s) ds = -3,
  // u(t) = (1-t) - 3 t(1-t) = (1-t)(1-3t).
  const auto plan_y =
      build_plan(model, constant_pair(model, 0, 0), constant_pair(model, 0, 1), t0);
  CHECK(plan_y.e_vec[0] == doctest::Approx(-3.0).epsilon(1e-8));
  CHECK(plan_y.u_nodes(16, 0) == doctest::Approx(-0.25).epsilon(1e-8));
  CHECK(plan_y.x_resid_after_T <= 1e-8);
}

TEST_CASE("identical pairs produce the unit density exactly") {
  const auto model = scalar_example(16);
  const auto init = constant_pair(model, 0.4, -0.1);
  const auto plan = build_plan(model, init, init, 1.5);
  CHECK(plan.e_vec.norm() == 0.0);

  const auto res = run_plan(plan, model, 99, 0, 4);
  CHECK(res.girsanov.log_R == 0.0);
  CHECK(res.girsanov.stoch_integral == 0.0);
  CHECK(res.girsanov.phi_sq_integral == 0.0);
  CHECK(res.terminal_gap_x == 0.0);
  CHECK(res.terminal_gap_y == 0.0);
  CHECK(res.delta_y_resid == 0.0);
  for (double g : res.coupling.gap_x) CHECK(g == 0.0);
}

TEST_CASE("steered pair meets at the horizon") {
  // Fine grid: dt = 1e-3.  Both blocks must close to quadrature
  // accuracy, and the realised Y gap must track the plan to rounding.
  const auto model = scalar_example(500);
  const auto init = constant_pair(model, 0, 0);
  const auto init_bar = constant_pair(model, 0.2, 0.1);
  const auto plan = build_plan(model, init, init_bar, 1.5);

  const auto res = run_plan(plan, model, 2024, 0, 0);
  CHECK(res.girsanov.log_R ==
        doctest::Approx(-res.girsanov.stoch_integral -
                        0.5 * res.girsanov.phi_sq_integral)
            .epsilon(1e-12));
  CHECK(res.terminal_gap_x <= 1e-6);
  CHECK(res.terminal_gap_y <= 1e-6);
  CHECK(res.delta_y_resid <= 1e-12);
}

TEST_CASE("density estimate is unbiased and Cauchy-Schwarz tight") {
  const auto model = scalar_example();
  const auto bank = default_functional_bank();
  REQUIRE(bank.size() >= 5);

  const auto rep = estimate_harnack(model, constant_pair(model, 0, 0),
                                    constant_pair(model, 0.2, 0.1), 1.5, bank,
                                    64, 7, 1);
  CHECK(rep.M == 64);
  CHECK(rep.seed == 7);
  CHECK(std::abs(rep.mean_R - 1.0) <= 3.0 * rep.se_R);
  CHECK(rep.se_R > 0);
  CHECK(rep.log_R_paths.size() == 64);
  CHECK(rep.phi_sq_paths.size() == 64);
  CHECK(rep.qtilde_cond == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.max_delta_y_resid <= 1e-12);
  CHECK(rep.plan_x_resid <= 1e-8);
  CHECK(rep.max_terminal_gap <= 1e-4);
  CHECK(rep.rho == doctest::Approx(model.alpha_weight() * 0.2 + 0.1)
                       .epsilon(1e-12));
  CHECK(std::isfinite(rep.c_hat));
  CHECK(std::isfinite(rep.log_mean_R2));

  for (const auto& row : rep.rows) {
    CHECK(row.lhs <= row.rhs * (1 + 1e-12) + 1e-300);
    CHECK(row.slack == doctest::Approx(row.rhs - row.lhs).epsilon(1e-12));
    // Terminals coincide to ~1e-5, so the cross form tracks the
    // same-sample form closely.
    CHECK(std::abs(row.rhs_cross - row.rhs) <= 1e-3 * (row.rhs + 1.0));
  }
}

TEST_CASE("density estimate ignores the worker count") {
  const auto model = scalar_example();
  const auto bank = default_functional_bank();
  const auto a = estimate_harnack(model, constant_pair(model, 0, 0),
                                  constant_pair(model, 0.1, 0.05), 1.5, bank,
                                  32, 5, 1);
  const auto b = estimate_harnack(model, constant_pair(model, 0, 0),
                                  constant_pair(model, 0.1, 0.05), 1.5, bank,
                                  32, 5, 4);
  CHECK(a.mean_R == b.mean_R);
  CHECK(a.log_mean_R2 == b.log_mean_R2);
  CHECK(a.log_R_paths == b.log_R_paths);
  for (size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].lhs == b.rows[i].lhs);
    CHECK(a.rows[i].rhs == b.rows[i].rhs);
  }
}

TEST_CASE("identical pairs through the full estimator") {
  const auto model = scalar_example(16);
  const auto init = constant_pair(model, 0.3, 0.0);
  const auto rep = estimate_harnack(model, init, init, 1.5,
                                    default_functional_bank(), 8, 1, 1);
  CHECK(rep.mean_R == 1.0);
  CHECK(rep.se_R == 0.0);
  CHECK(rep.max_terminal_gap == 0.0);
}

TEST_CASE("plan horizon must clear the delay span") {
  const auto model = scalar_example(16);
  const auto init = constant_pair(model, 0, 0);
  const auto bar = constant_pair(model, 1, 0);
  // t0 <= r0 leaves no steering interval.
  CHECK_THROWS_AS(build_plan(model, init, bar, 0.5), input_error);
  // t0 must sit on the step grid.
  CHECK_THROWS_AS(build_plan(model, init, bar, 1.5001), input_error);
}
