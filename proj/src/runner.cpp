#include "fsl/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fsl/coupling.hpp"
#include "fsl/csv.hpp"
#include "fsl/ergodics.hpp"
#include "fsl/errors.hpp"
#include "fsl/fernique.hpp"
#include "fsl/simulate.hpp"

namespace fsl {
namespace {

namespace fs = std::filesystem;

struct Emitter {
  std::string dir;
  bool csv_on = true;
  bool txt_on = true;
  std::vector<std::string> files;

  std::string abs(const std::string& name) const {
    return (fs::path(dir) / name).string();
  }
  // Registers the file if its format is enabled; emission order is the
  // manifest order.
  bool want(const std::string& name) {
    const bool is_txt = name.size() > 4 && name.rfind(".txt") == name.size() - 4;
    if (is_txt ? txt_on : csv_on) {
      files.push_back(name);
      return true;
    }
    return false;
  }
};

std::string flag(bool b) { return b ? "1" : "0"; }

double require_T(const ExperimentConfig& cfg, const std::string& family) {
  require_input(cfg.run.has_T, "runner: run.T required for the " + family +
                                   " family");
  return cfg.run.T;
}

int64_t require_M(const ExperimentConfig& cfg, const std::string& family) {
  require_input(cfg.run.has_M, "runner: run.M required for the " + family +
                                   " family");
  return cfg.run.M;
}

double require_t0(const ExperimentConfig& cfg, const std::string& family) {
  require_input(cfg.run.has_t0, "runner: run.t0 required for the " + family +
                                    " family");
  return cfg.run.t0;
}

const NondegenerateModel& nondeg_only(const ExperimentConfig& cfg,
                                      const std::string& family) {
  require_input(!cfg.degenerate, "runner: the " + family +
                                     " family needs a nondegenerate model");
  return cfg.nondeg;
}

Eigen::VectorXd e1_offset(int dim, double g) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  if (dim > 0) v[0] = g;
  return v;
}

struct LineFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
};

LineFit least_squares(const std::vector<double>& x,
                      const std::vector<double>& y) {
  require_input(x.size() == y.size() && x.size() >= 2,
                "fit: need at least two points");
  const double n = double(x.size());
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  require_input(sxx > 0, "fit: degenerate abscissa");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

void run_check(const ExperimentConfig& cfg, Emitter& em, RunManifest& man) {
  std::vector<std::vector<std::string>> rows;
  const auto add = [&](const std::string& name, double value, bool pass) {
    rows.push_back({name, csv::num(value), flag(pass)});
  };

  if (!cfg.degenerate) {
    if (cfg.checks.noise_regularity) {
      const ConditionReport rep =
          check_noise_regularity(cfg.nondeg.spec, cfg.run.delta_reg);
      add("noise_sum", rep.value, rep.pass);
      add("noise_eps_max", rep.eps_max, true);
      man.checks_pass = man.checks_pass && rep.pass;
    }
    if (cfg.checks.rate) {
      const RateResult r = cfg.nondeg.rate();
      add("rate_lambda", r.rate, r.positive);
      add("rate_argmax", r.argmax_s, true);
      man.checks_pass = man.checks_pass && r.positive;
    }
  } else {
    if (cfg.checks.noise_regularity) {
      const ConditionReport rep =
          check_noise_regularity(cfg.deg.spec2, cfg.run.delta_reg);
      add("noise_sum", rep.value, rep.pass);
      add("noise_eps_max", rep.eps_max, true);
      man.checks_pass = man.checks_pass && rep.pass;
    }
    if (cfg.checks.gap) {
      const GapReport g = cfg.deg.gap();
      add("lambda_prime", g.lambda_prime, true);
      add("alpha_weight", cfg.deg.alpha_weight(), true);
      add("gap_sup_se", g.sup_se, true);
      add("gap_rate", g.rate, g.pass);
      man.checks_pass = man.checks_pass && g.pass;
    }
    if (cfg.checks.b3) {
      const B3Report b3 = check_B3(cfg.deg);
      add("b3_sym_max", b3.sym_max, b3.pass);
      add("b3_margin", b3.margin, b3.pass);
      man.checks_pass = man.checks_pass && b3.pass;
    }
    if (cfg.checks.b4) {
      std::vector<double> times;
      for (int k = 1; k <= 10; ++k) times.push_back(0.1 * k);
      const B4Report b4 = check_B4(cfg.deg, times, 1.0);
      add("b4_residual", b4.max_residual, b4.pass);
      add("b4_gramian_min_eig", b4.q_min_eig, b4.pass);
      add("b4_gramian_cond", b4.q_cond, true);
      man.checks_pass = man.checks_pass && b4.pass;
    }
  }

  if (em.want("checks.csv")) {
    csv::Writer w(em.abs("checks.csv"), {"check", "value", "pass"});
    for (const auto& r : rows) w.raw_row(r);
  }
}

void run_simulate(const ExperimentConfig& cfg, Emitter& em, RunManifest&) {
  const double T = require_T(cfg, "simulate");
  const int64_t M = cfg.run.has_M ? cfg.run.M : 1;
  const int rec = cfg.run.record_every >= 1 ? cfg.run.record_every : 1;
  if (!cfg.degenerate) {
    if (!em.want("paths.csv")) return;
    csv::Writer w(em.abs("paths.csv"), {"path", "t", "sup"});
    const Segment init(cfg.nondeg.grid, cfg.nondeg.dim());
    for (int64_t j = 0; j < M; ++j) {
      const PathRecord p =
          simulate_nondegenerate(cfg.nondeg, init, T,
                                 rng::PathNoise(cfg.run.seed, uint32_t(j)),
                                 {rec, 0});
      for (size_t k = 0; k < p.t.size(); ++k)
        w.row({double(j), p.t[k], p.sup[k]});
    }
  } else {
    if (!em.want("paths.csv")) return;
    csv::Writer w(em.abs("paths.csv"), {"path", "t", "sup_x", "sup_y"});
    const DegState init{Segment(cfg.deg.grid, cfg.deg.n1()),
                        Segment(cfg.deg.grid, cfg.deg.n2())};
    for (int64_t j = 0; j < M; ++j) {
      const PathRecord2 p =
          simulate_degenerate(cfg.deg, init, T,
                              rng::PathNoise(cfg.run.seed, uint32_t(j)),
                              {rec, 0});
      for (size_t k = 0; k < p.t.size(); ++k)
        w.row({double(j), p.t[k], p.sup_x[k], p.sup_y[k]});
    }
  }
}

// Shared by couple and contract: one record per path, full grid when
// rec == 1.
std::vector<CouplingRecord> run_couples(const ExperimentConfig& cfg, double T,
                                        int64_t M, int rec) {
  std::vector<CouplingRecord> out;
  out.reserve(size_t(M));
  if (!cfg.degenerate) {
    const Segment xi(cfg.nondeg.grid, cfg.nondeg.dim());
    const Segment eta = Segment::constant(
        cfg.nondeg.grid, e1_offset(cfg.nondeg.dim(), cfg.run.gap_x));
    for (int64_t j = 0; j < M; ++j)
      out.push_back(synchronous_couple(cfg.nondeg, xi, eta, T, cfg.run.seed,
                                       uint32_t(j), rec));
  } else {
    const DegState a{Segment(cfg.deg.grid, cfg.deg.n1()),
                     Segment(cfg.deg.grid, cfg.deg.n2())};
    const DegState b{
        Segment::constant(cfg.deg.grid, e1_offset(cfg.deg.n1(), cfg.run.gap_x)),
        Segment::constant(cfg.deg.grid, e1_offset(cfg.deg.n2(), cfg.run.gap_y))};
    for (int64_t j = 0; j < M; ++j)
      out.push_back(synchronous_couple(cfg.deg, a, b, T, cfg.run.seed,
                                       uint32_t(j), rec));
  }
  return out;
}

void run_couple(const ExperimentConfig& cfg, Emitter& em, RunManifest& man) {
  const double T = require_T(cfg, "couple");
  const int64_t M = cfg.run.has_M ? cfg.run.M : 1;
  const int rec = cfg.run.record_every >= 1 ? cfg.run.record_every : 1;
  const std::vector<CouplingRecord> recs = run_couples(cfg, T, M, rec);

  if (em.want("coupling.csv")) {
    if (!cfg.degenerate) {
      csv::Writer w(em.abs("coupling.csv"), {"path", "t", "gap"});
      for (const auto& r : recs)
        for (size_t k = 0; k < r.t.size(); ++k)
          w.row({double(r.path), r.t[k], r.gap_x[k]});
    } else {
      csv::Writer w(em.abs("coupling.csv"), {"path", "t", "gap_x", "gap_y"});
      for (const auto& r : recs)
        for (size_t k = 0; k < r.t.size(); ++k)
          w.row({double(r.path), r.t[k], r.gap_x[k], r.gap_y[k]});
    }
  }

  double max_ratio = 0;
  bool any_checked = false;
  for (const auto& r : recs) {
    if (r.bound_checked) any_checked = true;
    max_ratio = std::max(max_ratio, r.max_bound_ratio);
  }
  if (em.want("couple_report.txt")) {
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("paths", std::to_string(M));
    kv.emplace_back("initial_gap_x", csv::num(recs[0].initial_gap_x));
    kv.emplace_back("initial_gap_y", csv::num(recs[0].initial_gap_y));
    kv.emplace_back("bound_checked", flag(any_checked));
    kv.emplace_back("max_bound_ratio", csv::num(max_ratio));
    csv::write_kv(em.abs("couple_report.txt"), kv);
  }
  (void)man;
}

void run_harnack(const ExperimentConfig& cfg, Emitter& em, RunManifest& man) {
  require_input(cfg.degenerate,
                "runner: the harnack family needs a degenerate model");
  const double t0 = require_t0(cfg, "harnack");
  const int64_t M = require_M(cfg, "harnack");
  const DegState init{Segment(cfg.deg.grid, cfg.deg.n1()),
                      Segment(cfg.deg.grid, cfg.deg.n2())};
  const DegState init_bar{
      Segment::constant(cfg.deg.grid, e1_offset(cfg.deg.n1(), cfg.run.gap_x)),
      Segment::constant(cfg.deg.grid, e1_offset(cfg.deg.n2(), cfg.run.gap_y))};
  const HarnackReport rep =
      estimate_harnack(cfg.deg, init, init_bar, t0, default_functional_bank(),
                       M, cfg.run.seed, cfg.run.workers);

  if (em.want("harnack_slack.csv")) {
    csv::Writer w(em.abs("harnack_slack.csv"),
                  {"functional", "lhs", "rhs", "rhs_cross", "slack"});
    for (const auto& row : rep.rows)
      w.raw_row({row.name, csv::num(row.lhs), csv::num(row.rhs),
                 csv::num(row.rhs_cross), csv::num(row.slack)});
  }
  if (em.want("girsanov.csv")) {
    csv::Writer w(em.abs("girsanov.csv"), {"path", "log_R", "phi_sq"});
    for (size_t j = 0; j < rep.log_R_paths.size(); ++j)
      w.row({double(j), rep.log_R_paths[j], rep.phi_sq_paths[j]});
  }
  if (em.want("harnack_report.txt")) {
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("M", std::to_string(rep.M));
    kv.emplace_back("mean_R", csv::num(rep.mean_R));
    kv.emplace_back("se_R", csv::num(rep.se_R));
    kv.emplace_back("mean_R2_plain", csv::num(rep.mean_R2_plain));
    kv.emplace_back("log_mean_R2", csv::num(rep.log_mean_R2));
    kv.emplace_back("rho", csv::num(rep.rho));
    kv.emplace_back("c_hat", csv::num(rep.c_hat));
    kv.emplace_back("mean_phi_sq", csv::num(rep.mean_phi_sq));
    kv.emplace_back("c_phi", csv::num(rep.c_phi));
    kv.emplace_back("max_terminal_gap", csv::num(rep.max_terminal_gap));
    kv.emplace_back("max_delta_y_resid", csv::num(rep.max_delta_y_resid));
    kv.emplace_back("plan_x_resid", csv::num(rep.plan_x_resid));
    kv.emplace_back("qtilde_cond", csv::num(rep.qtilde_cond));
    csv::write_kv(em.abs("harnack_report.txt"), kv);
  }

  // Unit-mean gate for the density and the per-functional inequality.
  bool ok = std::abs(rep.mean_R - 1.0) <= 3.0 * rep.se_R;
  for (const auto& row : rep.rows)
    ok = ok && row.lhs <= row.rhs * (1 + 1e-12) + 1e-300;
  man.checks_pass = man.checks_pass && ok;
}

void run_fernique(const ExperimentConfig& cfg, Emitter& em, RunManifest& man) {
  const double t0 = require_t0(cfg, "fernique");
  const int64_t M = require_M(cfg, "fernique");
  const SpectralData& spec = cfg.degenerate ? cfg.deg.spec2 : cfg.nondeg.spec;
  const SegmentGrid& grid = cfg.degenerate ? cfg.deg.grid : cfg.nondeg.grid;
  const FerniqueCoeffs coeffs =
      compute_coeffs(spec, cfg.run.delta_reg, grid.r0, t0);

  if (!coeffs.theta_finite) {
    man.checks_pass = false;
    if (em.want("fernique_report.txt")) {
      csv::write_kv(em.abs("fernique_report.txt"),
                    {{"theta_finite", "0"},
                     {"theta_explicit", csv::num(coeffs.theta_explicit)}});
    }
    return;
  }

  const double lam = cfg.run.lam_frac * coeffs.lambda_tilde;
  std::vector<double> r_grid = cfg.run.r_grid;
  const double thr = tail_bound(coeffs, lam, 1.0).r_threshold;
  if (r_grid.empty()) {
    for (double mult : {1.0, 1.1, 1.25, 1.5, 2.0}) r_grid.push_back(mult * thr);
  }
  const TailReport rep =
      empirical_sup_tail(spec, cfg.run.delta_reg, t0, grid, M, r_grid, lam,
                         cfg.run.seed, cfg.run.workers);

  if (em.want("fernique.csv")) {
    csv::Writer w(em.abs("fernique.csv"),
                  {"r", "count", "p_hat", "wilson_upper", "bound"});
    for (size_t i = 0; i < rep.r.size(); ++i)
      w.row({rep.r[i], double(rep.count[i]), rep.p_hat[i], rep.wilson_upper[i],
             rep.bound[i]});
  }
  if (em.want("fernique_report.txt")) {
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("theta_finite", "1");
    kv.emplace_back("theta", csv::num(coeffs.theta));
    kv.emplace_back("theta_explicit", csv::num(coeffs.theta_explicit));
    kv.emplace_back("theta_tail_bound", csv::num(coeffs.theta_tail_bound));
    kv.emplace_back("lambda_tilde", csv::num(coeffs.lambda_tilde));
    kv.emplace_back("lam", csv::num(lam));
    kv.emplace_back("r_threshold", csv::num(thr));
    kv.emplace_back("hoelder_c1", csv::num(coeffs.hoelder_c1));
    kv.emplace_back("M", std::to_string(rep.M));
    kv.emplace_back("verdict_point", flag(rep.verdict_point));
    kv.emplace_back("verdict_wilson", flag(rep.verdict_wilson));
    csv::write_kv(em.abs("fernique_report.txt"), kv);
  }
  // The point verdict gates; the Wilson verdict stays informational
  // because the bound sits far below the resolution floor of any
  // finite-sample upper confidence limit once r clears the threshold.
  man.checks_pass = man.checks_pass && rep.verdict_point;
}

void run_contract(const ExperimentConfig& cfg, Emitter& em, RunManifest& man) {
  const double T = require_T(cfg, "contract");
  const int64_t M = require_M(cfg, "contract");
  const std::vector<CouplingRecord> recs = run_couples(cfg, T, M, 1);

  double theoretical = 0;
  double alpha = 0;
  if (!cfg.degenerate) {
    const RateResult r = cfg.nondeg.rate();
    theoretical = r.positive ? r.rate : 0;
  } else {
    const GapReport g = cfg.deg.gap();
    theoretical = g.pass ? g.rate : 0;
    alpha = cfg.deg.alpha_weight();
  }
  const ContractionFit fit = fit_contraction_rate(
      recs, cfg.degenerate ? 0.0 : cfg.nondeg.grid.r0, theoretical, alpha);

  if (em.want("contraction.csv")) {
    csv::Writer w(em.abs("contraction.csv"), {"t", "mean_gap"});
    const size_t nt = recs[0].t.size();
    for (size_t k = 0; k < nt; ++k) {
      double g = 0;
      for (const auto& r : recs)
        g += cfg.degenerate ? alpha * r.gap_x[k] + r.gap_y[k] : r.gap_x[k];
      w.row({recs[0].t[k], g / double(M)});
    }
  }

  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("fitted_rate", csv::num(fit.fitted_rate));
  kv.emplace_back("r_squared", csv::num(fit.r_squared));
  kv.emplace_back("theoretical_rate", csv::num(fit.theoretical_rate));
  kv.emplace_back("relative_gap", csv::num(fit.relative_gap));
  kv.emplace_back("points_used", std::to_string(fit.points_used));
  kv.emplace_back("floor_hit", flag(fit.floor_hit));
  const bool one_sided =
      theoretical <= 0 || fit.fitted_rate >= 0.8 * theoretical;
  kv.emplace_back("one_sided_pass", flag(one_sided));
  man.checks_pass = man.checks_pass && one_sided;

  // Two-start gap decay across t1, when requested.
  if (!cfg.run.t1_grid.empty() && cfg.run.has_t2) {
    std::vector<WassersteinEstimate> ests;
    for (double t1 : cfg.run.t1_grid) {
      ests.push_back(
          cfg.degenerate
              ? w_cauchy_gap(cfg.deg,
                             DegState{Segment(cfg.deg.grid, cfg.deg.n1()),
                                      Segment(cfg.deg.grid, cfg.deg.n2())},
                             t1, cfg.run.t2, M, cfg.run.seed, cfg.run.workers)
              : w_cauchy_gap(cfg.nondeg,
                             Segment(cfg.nondeg.grid, cfg.nondeg.dim()), t1,
                             cfg.run.t2, M, cfg.run.seed, cfg.run.workers));
    }
    if (em.want("wcauchy.csv")) {
      csv::Writer w(em.abs("wcauchy.csv"), {"t1", "mean_gap", "se"});
      for (const auto& est : ests) w.row({est.t1, est.mean_gap, est.se});
    }
    std::vector<double> t1s, logs;
    for (const auto& est : ests)
      if (est.mean_gap > 0) {
        t1s.push_back(est.t1);
        logs.push_back(std::log(est.mean_gap));
      }
    if (t1s.size() >= 2) {
      const LineFit lf = least_squares(t1s, logs);
      kv.emplace_back("wc_slope", csv::num(lf.slope));
      kv.emplace_back("wc_r_squared", csv::num(lf.r2));
    }
  }

  if (em.want("contract_fit.txt")) csv::write_kv(em.abs("contract_fit.txt"), kv);
}

void run_concentrate(const ExperimentConfig& cfg, Emitter& em,
                     RunManifest& man) {
  const NondegenerateModel& model = nondeg_only(cfg, "concentrate");
  const int64_t M = require_M(cfg, "concentrate");
  std::vector<double> eps_grid = cfg.run.eps_grid;
  if (eps_grid.empty()) eps_grid = {0.0, 0.1, 0.25, 0.5};
  std::vector<double> t_grid = cfg.run.t_grid;
  if (t_grid.empty()) {
    const double r0 = model.grid.r0;
    t_grid = {r0, 2 * r0, 4 * r0, 8 * r0};
  }
  const ConcentrationTable tbl = estimate_concentration(
      model, eps_grid, t_grid, M, cfg.run.seed, cfg.run.workers);

  if (em.want("concentration.csv")) {
    csv::Writer w(em.abs("concentration.csv"),
                  {"t", "eps", "mean", "se", "overflow"});
    for (size_t i = 0; i < tbl.t.size(); ++i)
      for (size_t k = 0; k < tbl.eps.size(); ++k)
        w.raw_row({csv::num(tbl.t[i]), csv::num(tbl.eps[k]),
                   csv::num(tbl.mean(Eigen::Index(i), Eigen::Index(k))),
                   csv::num(tbl.se(Eigen::Index(i), Eigen::Index(k))),
                   flag(tbl.overflow[i][k])});
  }

  // eps = 0 column exactness and monotonicity across finite cells.
  bool ok = true;
  for (size_t i = 0; i < tbl.t.size(); ++i) {
    double prev = 0;
    for (size_t k = 0; k < tbl.eps.size(); ++k) {
      if (tbl.overflow[i][k]) continue;
      const double v = tbl.mean(Eigen::Index(i), Eigen::Index(k));
      if (tbl.eps[k] == 0) ok = ok && v == 1.0;
      ok = ok && v >= prev;
      prev = v;
    }
  }
  man.checks_pass = man.checks_pass && ok;
}

void run_invariant(const ExperimentConfig& cfg, Emitter& em, RunManifest&) {
  const NondegenerateModel& model = nondeg_only(cfg, "invariant");
  const int64_t M = require_M(cfg, "invariant");
  const double burn_in = cfg.run.has_burn_in ? cfg.run.burn_in : 0.0;
  const double eps = cfg.run.has_eps ? cfg.run.eps : 0.0;
  const InvariantSummary inv =
      sample_invariant(model, burn_in, M, eps, cfg.run.seed, cfg.run.workers);

  if (em.want("invariant.txt")) {
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("M", std::to_string(inv.M));
    kv.emplace_back("burn_in", csv::num(inv.burn_in));
    kv.emplace_back("sup_mean", csv::num(inv.sup_mean));
    kv.emplace_back("sup_var", csv::num(inv.sup_var));
    kv.emplace_back("eps", csv::num(inv.eps));
    kv.emplace_back("exp_moment", csv::num(inv.exp_moment));
    kv.emplace_back("exp_moment_se", csv::num(inv.exp_moment_se));
    kv.emplace_back("exp_overflow", flag(inv.exp_overflow));
    csv::write_kv(em.abs("invariant.txt"), kv);
  }
  if (em.want("invariant_coords.csv")) {
    csv::Writer w(em.abs("invariant_coords.csv"), {"coord", "mean", "var"});
    for (Eigen::Index i = 0; i < inv.coord_mean.size(); ++i)
      w.row({double(i), inv.coord_mean[i], inv.coord_var[i]});
  }
}

}  // namespace

const std::vector<std::string>& experiment_families() {
  static const std::vector<std::string> fams = {
      "check",    "simulate", "couple",      "harnack",
      "fernique", "contract", "concentrate", "invariant"};
  return fams;
}

RunManifest run_experiment(const ExperimentConfig& cfg,
                           const std::string& family) {
  RunManifest man;
  man.config_hash = config_hash(cfg);
  man.seed = cfg.run.seed;
  man.version = kArtifactVersion;
  man.family = family;

  std::error_code ec;
  fs::create_directories(cfg.output.dir, ec);
  require_input(!ec, "runner: cannot create output directory " +
                         cfg.output.dir);

  Emitter em;
  em.dir = cfg.output.dir;
  em.csv_on = em.txt_on = false;
  for (const std::string& f : cfg.output.formats) {
    if (f == "csv") em.csv_on = true;
    if (f == "txt") em.txt_on = true;
  }

  try {
    if (family == "check") run_check(cfg, em, man);
    else if (family == "simulate") run_simulate(cfg, em, man);
    else if (family == "couple") run_couple(cfg, em, man);
    else if (family == "harnack") run_harnack(cfg, em, man);
    else if (family == "fernique") run_fernique(cfg, em, man);
    else if (family == "contract") run_contract(cfg, em, man);
    else if (family == "concentrate") run_concentrate(cfg, em, man);
    else if (family == "invariant") run_invariant(cfg, em, man);
    else throw input_error("runner: unknown family '" + family + "'");
  } catch (const input_error& e) {
    throw input_error("[" + family + "] " + e.what());
  } catch (const numerical_error& e) {
    throw numerical_error("[" + family + "] " + e.what());
  }

  em.files.push_back("manifest.txt");
  man.files = em.files;

  char hash_hex[17];
  std::snprintf(hash_hex, sizeof hash_hex, "%016llx",
                static_cast<unsigned long long>(man.config_hash));
  std::ofstream mf(em.abs("manifest.txt"), std::ios::binary);
  require_input(mf.good(), "runner: cannot write manifest");
  mf << "version=" << man.version << '\n';
  mf << "family=" << man.family << '\n';
  mf << "config_hash=" << hash_hex << '\n';
  mf << "seed=" << man.seed << '\n';
  mf << "checks_pass=" << flag(man.checks_pass) << '\n';
  for (const std::string& f : man.files) mf << "file=" << f << '\n';
  return man;
}

}  // namespace fsl
