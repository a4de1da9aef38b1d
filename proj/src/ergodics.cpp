#include "fsl/ergodics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fsl/parallel.hpp"
#include "fsl/rng.hpp"
#include "fsl/simulate.hpp"

namespace fsl {

namespace {
constexpr double kLogFloor = 1e-300;

double sample_se(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0;
  double s = 0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / double(v.size() - 1) / double(v.size()));
}
}  // namespace

ContractionFit fit_contraction_rate(const std::vector<CouplingRecord>& records,
                                    double t_min, double theoretical_rate,
                                    double alpha) {
  require_input(!records.empty(), "contraction fit: no records");
  const auto& t = records.front().t;
  require_input(t.size() >= 2, "contraction fit: record the gap series");
  for (const auto& r : records)
    require_input(r.t == t, "contraction fit: records on different time grids");

  double init = 0;
  for (const auto& r : records)
    init += alpha * r.initial_gap_x + r.initial_gap_y +
            (r.gap_y.empty() ? (1 - alpha) * r.initial_gap_x : 0);
  require_input(init > 0, "degenerate fit input");

  ContractionFit fit;
  fit.theoretical_rate = theoretical_rate;
  std::vector<double> ts, ys;
  for (size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_min) continue;
    double g = 0;
    for (const auto& r : records)
      g += r.gap_y.empty() ? r.gap_x[i] : alpha * r.gap_x[i] + r.gap_y[i];
    g /= double(records.size());
    if (g <= kLogFloor) {
      fit.floor_hit = true;
      continue;
    }
    ts.push_back(t[i]);
    ys.push_back(std::log(g));
  }
  require_input(ts.size() >= 2, "degenerate fit input");
  fit.points_used = int(ts.size());

  const double n = double(ts.size());
  double tm = 0, ym = 0;
  for (size_t i = 0; i < ts.size(); ++i) {
    tm += ts[i];
    ym += ys[i];
  }
  tm /= n;
  ym /= n;
  double stt = 0, sty = 0, syy = 0;
  for (size_t i = 0; i < ts.size(); ++i) {
    stt += (ts[i] - tm) * (ts[i] - tm);
    sty += (ts[i] - tm) * (ys[i] - ym);
    syy += (ys[i] - ym) * (ys[i] - ym);
  }
  require_input(stt > 0, "degenerate fit input");
  const double slope = sty / stt;
  fit.fitted_rate = -slope;
  fit.r_squared = syy > 0 ? (sty * sty) / (stt * syy) : 1.0;
  fit.relative_gap = theoretical_rate != 0
                         ? (fit.fitted_rate - theoretical_rate) / theoretical_rate
                         : 0;
  return fit;
}

ConcentrationTable estimate_concentration(const NondegenerateModel& model,
                                          const std::vector<double>& eps_grid,
                                          const std::vector<double>& t_grid,
                                          int64_t M, uint64_t seed,
                                          int workers) {
  model.validate();
  require_input(M > 0, "concentration: M must be positive");
  require_input(!eps_grid.empty() && !t_grid.empty(),
                "concentration: empty grid");
  for (double e : eps_grid)
    require_input(e >= 0, "concentration: eps must be nonnegative");

  std::vector<int64_t> targets;
  for (double tv : t_grid) targets.push_back(steps_for(tv, model.grid));
  for (size_t i = 1; i < targets.size(); ++i)
    require_input(targets[i - 1] < targets[i],
                  "concentration: t grid must be strictly increasing");

  const double dt = model.grid.dt();
  const StepCoeffs c = make_step_coeffs(model.spec, dt);
  const int64_t n_steps = targets.back();
  const int nt = int(t_grid.size());

  Eigen::MatrixXd sups(M, nt);
  parallel_for(M, workers, [&](int64_t j) {
    Segment seg(model.grid, model.dim());
    rng::PathNoise noise(seed, uint32_t(j));
    Eigen::VectorXd z(model.dim());
    int next = 0;
    if (targets[0] == 0) sups(j, next++) = seg.sup_norm();
    for (int64_t k = 0; k < n_steps; ++k) {
      noise.normals(uint64_t(k), z);
      const Eigen::VectorXd b = eval_drift(model.drift, seg);
      seg.push(ou_step(seg.newest(), c, b, z));
      if (next < nt && k + 1 == targets[size_t(next)])
        sups(j, next++) = seg.sup_norm();
    }
  });

  ConcentrationTable tab;
  tab.eps = eps_grid;
  tab.t = t_grid;
  tab.M = M;
  tab.seed = seed;
  tab.mean.resize(nt, int(eps_grid.size()));
  tab.se.resize(nt, int(eps_grid.size()));
  tab.overflow.assign(size_t(nt),
                      std::vector<bool>(eps_grid.size(), false));
  for (int it = 0; it < nt; ++it) {
    for (size_t ie = 0; ie < eps_grid.size(); ++ie) {
      double sum = 0;
      bool over = false;
      std::vector<double> vals(static_cast<size_t>(M));
      for (int64_t j = 0; j < M; ++j) {
        const double s = sups(j, it);
        const double v = std::exp(eps_grid[ie] * s * s);
        vals[size_t(j)] = v;
        sum += v;
        if (!std::isfinite(v)) over = true;
      }
      const double mean = sum / double(M);
      tab.mean(it, int(ie)) = mean;
      tab.se(it, int(ie)) = over ? std::numeric_limits<double>::infinity()
                                 : sample_se(vals, mean);
      tab.overflow[size_t(it)][ie] = over;
    }
  }
  return tab;
}

WassersteinEstimate w_cauchy_gap(const NondegenerateModel& model,
                                 const Segment& xi, double t1, double t2,
                                 int64_t M, uint64_t seed, int workers) {
  model.validate();
  require_input(t1 > 0 && t2 >= t1, "w-cauchy: need t2 >= t1 > 0");
  require_input(M > 0, "w-cauchy: M must be positive");
  const int64_t k1 = steps_for(t1, model.grid);
  const int64_t k2 = steps_for(t2, model.grid);

  std::vector<double> gaps(static_cast<size_t>(M));
  parallel_for(M, workers, [&](int64_t j) {
    SimOptions longer;
    longer.record_every = 0;
    SimOptions shorter;
    shorter.record_every = 0;
    shorter.step0 = uint64_t(k2 - k1);
    const PathRecord a = simulate_nondegenerate(
        model, xi, t2, rng::PathNoise(seed, uint32_t(j)), longer);
    const PathRecord b = simulate_nondegenerate(
        model, xi, t1, rng::PathNoise(seed, uint32_t(j)), shorter);
    gaps[size_t(j)] = Segment::sup_gap(a.terminal, b.terminal);
  });

  WassersteinEstimate est;
  est.t1 = t1;
  est.t2 = t2;
  est.M = M;
  est.seed = seed;
  for (double g : gaps) est.mean_gap += g;
  est.mean_gap /= double(M);
  est.se = sample_se(gaps, est.mean_gap);
  return est;
}

WassersteinEstimate w_cauchy_gap(const DegenerateModel& model,
                                 const DegState& init, double t1, double t2,
                                 int64_t M, uint64_t seed, int workers) {
  model.validate();
  require_input(t1 > 0 && t2 >= t1, "w-cauchy: need t2 >= t1 > 0");
  require_input(M > 0, "w-cauchy: M must be positive");
  const int64_t k1 = steps_for(t1, model.grid);
  const int64_t k2 = steps_for(t2, model.grid);
  const double alpha = model.alpha_weight();

  std::vector<double> gaps(static_cast<size_t>(M));
  parallel_for(M, workers, [&](int64_t j) {
    SimOptions longer;
    longer.record_every = 0;
    SimOptions shorter;
    shorter.record_every = 0;
    shorter.step0 = uint64_t(k2 - k1);
    const PathRecord2 a = simulate_degenerate(
        model, init, t2, rng::PathNoise(seed, uint32_t(j)), longer);
    const PathRecord2 b = simulate_degenerate(
        model, init, t1, rng::PathNoise(seed, uint32_t(j)), shorter);
    gaps[size_t(j)] =
        alpha * Segment::sup_gap(a.terminal.X, b.terminal.X) +
        Segment::sup_gap(a.terminal.Y, b.terminal.Y);
  });

  WassersteinEstimate est;
  est.t1 = t1;
  est.t2 = t2;
  est.M = M;
  est.seed = seed;
  for (double g : gaps) est.mean_gap += g;
  est.mean_gap /= double(M);
  est.se = sample_se(gaps, est.mean_gap);
  return est;
}

InvariantSummary sample_invariant(const NondegenerateModel& model,
                                  double burn_in, int64_t M, double eps,
                                  uint64_t seed, int workers) {
  model.validate();
  require_input(M > 1, "invariant sampling: M must exceed 1");
  require_input(eps >= 0, "invariant sampling: eps must be nonnegative");
  if (burn_in <= 0) {
    const RateResult rate = model.rate();
    require_input(rate.positive,
                  "invariant sampling: burn-in required when the contraction "
                  "rate is not positive");
    burn_in = 10 / rate.rate;
  }
  const double dt = model.grid.dt();
  const int64_t n_steps = int64_t(std::ceil(burn_in / dt - 1e-9));
  const double horizon = double(n_steps) * dt;
  const StepCoeffs c = make_step_coeffs(model.spec, dt);
  const int dim = model.dim();

  std::vector<double> sups(static_cast<size_t>(M));
  Eigen::MatrixXd coords(M, dim);
  parallel_for(M, workers, [&](int64_t j) {
    Segment seg(model.grid, dim);
    rng::PathNoise noise(seed, uint32_t(j));
    Eigen::VectorXd z(dim);
    for (int64_t k = 0; k < n_steps; ++k) {
      noise.normals(uint64_t(k), z);
      const Eigen::VectorXd b = eval_drift(model.drift, seg);
      seg.push(ou_step(seg.newest(), c, b, z));
    }
    sups[size_t(j)] = seg.sup_norm();
    coords.row(j) = seg.newest();
  });

  InvariantSummary out;
  out.M = M;
  out.burn_in = horizon;
  out.eps = eps;
  out.seed = seed;
  for (double s : sups) out.sup_mean += s;
  out.sup_mean /= double(M);
  for (double s : sups) out.sup_var += (s - out.sup_mean) * (s - out.sup_mean);
  out.sup_var /= double(M - 1);
  out.coord_mean = coords.colwise().mean();
  out.coord_var = (coords.rowwise() - out.coord_mean.transpose())
                      .array()
                      .square()
                      .colwise()
                      .sum()
                      .matrix() /
                  double(M - 1);
  std::vector<double> ev(static_cast<size_t>(M));
  for (int64_t j = 0; j < M; ++j) {
    ev[size_t(j)] = std::exp(eps * sups[size_t(j)] * sups[size_t(j)]);
    if (!std::isfinite(ev[size_t(j)])) out.exp_overflow = true;
    out.exp_moment += ev[size_t(j)];
  }
  out.exp_moment /= double(M);
  out.exp_moment_se = sample_se(ev, out.exp_moment);
  return out;
}

}  // namespace fsl
