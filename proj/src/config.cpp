#include "fsl/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fsl/errors.hpp"

namespace fsl {
namespace {

using nlohmann::json;

// Tracks which keys of an object were consumed; finish() rejects the
// rest, naming them by full path.
class Scope {
 public:
  Scope(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    require_input(j_.is_object(), "config: " + path_ + " must be an object");
  }

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const json& need(const std::string& key) {
    const json* p = get(key);
    require_input(p != nullptr,
                  "config: missing key '" + path_ + "." + key + "'");
    return *p;
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      require_input(seen_.count(it.key()) > 0,
                    "config: unknown key '" + path_ + "." + it.key() + "'");
  }

  const std::string& path() const { return path_; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

double as_num(const json& v, const std::string& path) {
  require_input(v.is_number(), "config: " + path + " must be a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
  require_input(v.is_number_integer(), "config: " + path + " must be an integer");
  return v.get<int>();
}

int64_t as_i64(const json& v, const std::string& path) {
  require_input(v.is_number_integer(), "config: " + path + " must be an integer");
  return v.get<int64_t>();
}

uint64_t as_u64(const json& v, const std::string& path) {
  require_input(v.is_number_unsigned() ||
                    (v.is_number_integer() && v.get<int64_t>() >= 0),
                "config: " + path + " must be a nonnegative integer");
  return v.get<uint64_t>();
}

bool as_bool(const json& v, const std::string& path) {
  require_input(v.is_boolean(), "config: " + path + " must be a boolean");
  return v.get<bool>();
}

std::string as_str(const json& v, const std::string& path) {
  require_input(v.is_string(), "config: " + path + " must be a string");
  return v.get<std::string>();
}

std::vector<double> as_vec(const json& v, const std::string& path) {
  require_input(v.is_array(), "config: " + path + " must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (size_t i = 0; i < v.size(); ++i)
    out.push_back(as_num(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

Eigen::VectorXd as_evec(const json& v, const std::string& path) {
  const std::vector<double> raw = as_vec(v, path);
  return Eigen::Map<const Eigen::VectorXd>(raw.data(), Eigen::Index(raw.size()));
}

Eigen::MatrixXd as_mat(const json& v, const std::string& path) {
  require_input(v.is_array(), "config: " + path + " must be an array of rows");
  const size_t rows = v.size();
  Eigen::MatrixXd out;
  for (size_t r = 0; r < rows; ++r) {
    const std::vector<double> row =
        as_vec(v[r], path + "[" + std::to_string(r) + "]");
    if (r == 0) out.resize(Eigen::Index(rows), Eigen::Index(row.size()));
    require_input(Eigen::Index(row.size()) == out.cols(),
                  "config: " + path + " rows must have equal width");
    for (size_t c = 0; c < row.size(); ++c)
      out(Eigen::Index(r), Eigen::Index(c)) = row[c];
  }
  if (rows == 0) out.resize(0, 0);
  return out;
}

TailLaw parse_tail(const json& j, const std::string& path) {
  Scope s(j, path);
  TailLaw law;
  law.a = as_num(s.need("a"), path + ".a");
  law.p = as_num(s.need("p"), path + ".p");
  law.b = as_num(s.need("b"), path + ".b");
  law.q = as_num(s.need("q"), path + ".q");
  s.finish();
  require_input(law.a > 0 && law.b >= 0,
                "config: " + path + " needs a > 0 and b >= 0");
  return law;
}

SpectralData parse_spectrum(const json& j, const std::string& path) {
  Scope s(j, path);
  SpectralData out;
  if (const json* fam = s.get("family")) {
    require_input(!s.has("lambda") && !s.has("s") && !s.has("tail"),
                  "config: " + path +
                      ".family excludes explicit lambda / s / tail");
    Scope f(*fam, path + ".family");
    const int n = as_int(f.need("n"), path + ".family.n");
    const TailLaw law = {as_num(f.need("a"), path + ".family.a"),
                         as_num(f.need("p"), path + ".family.p"),
                         as_num(f.need("b"), path + ".family.b"),
                         as_num(f.need("q"), path + ".family.q")};
    f.finish();
    require_input(n >= 1, "config: " + path + ".family.n must be >= 1");
    require_input(law.a > 0 && law.b >= 0,
                  "config: " + path + ".family needs a > 0 and b >= 0");
    for (int i = 1; i <= n; ++i) {
      out.lambda.push_back(law.a * std::pow(double(i), law.p));
      out.s.push_back(law.b * std::pow(double(i), law.q));
    }
    out.tail = law;
  } else {
    out.lambda = as_vec(s.need("lambda"), path + ".lambda");
    out.s = as_vec(s.need("s"), path + ".s");
    if (const json* t = s.get("tail")) out.tail = parse_tail(*t, path + ".tail");
  }
  s.finish();
  out.validate();
  return out;
}

DriftSpec parse_drift(const json& j, const std::string& path,
                      const SegmentGrid& grid, int dim) {
  Scope s(j, path);
  const std::string form = as_str(s.need("form"), path + ".form");
  DriftSpec d;
  if (form == "zero") {
    d.form = ZeroDrift{};
  } else if (form == "discrete") {
    DiscreteDelayDrift dd;
    const std::vector<double> taus = as_vec(s.need("taus"), path + ".taus");
    const json& cj = s.need("coeff");
    require_input(cj.is_array() && cj.size() == taus.size(),
                  "config: " + path + ".coeff needs one matrix per delay");
    for (size_t k = 0; k < taus.size(); ++k) {
      dd.delay_nodes.push_back(resolve_delay_node(taus[k], grid));
      dd.coeff.push_back(
          as_mat(cj[k], path + ".coeff[" + std::to_string(k) + "]"));
    }
    dd.offset = s.has("offset")
                    ? as_evec(s.need("offset"), path + ".offset")
                    : Eigen::VectorXd::Zero(dim).eval();
    d.form = dd;
  } else if (form == "distributed") {
    DistributedDelayDrift dd;
    const std::vector<double> taus = as_vec(s.need("taus"), path + ".taus");
    for (double tau : taus) dd.atom_nodes.push_back(resolve_delay_node(tau, grid));
    dd.weights = as_vec(s.need("weights"), path + ".weights");
    dd.gain = as_num(s.need("gain"), path + ".gain");
    d.form = dd;
  } else if (form == "supform") {
    SupFormDrift sf;
    const Eigen::VectorXd wc =
        as_evec(s.need("weight_const"), path + ".weight_const");
    sf.weight = wc.transpose().replicate(grid.nodes(), 1);
    sf.direction = as_evec(s.need("direction"), path + ".direction");
    d.form = sf;
  } else {
    throw input_error("config: " + path + ".form: unknown drift form '" +
                      form + "'");
  }
  d.L = s.has("L") ? as_num(s.need("L"), path + ".L")
                   : drift_lipschitz_bound(d);
  s.finish();
  validate_drift(d, grid, dim);
  return d;
}

DriftSpec2 parse_drift2(const json& j, const std::string& path,
                        const SegmentGrid& grid, int n2) {
  Scope s(j, path);
  const std::string form = as_str(s.need("form"), path + ".form");
  DriftSpec2 d;
  if (form == "zero") {
    d.form = Zero2Drift{};
  } else if (form == "linear" || form == "tanh") {
    const Eigen::MatrixXd C1 = as_mat(s.need("C1"), path + ".C1");
    const Eigen::MatrixXd C2 = as_mat(s.need("C2"), path + ".C2");
    const int d1 = resolve_delay_node(as_num(s.need("tau1"), path + ".tau1"), grid);
    const int d2 = resolve_delay_node(as_num(s.need("tau2"), path + ".tau2"), grid);
    if (form == "linear") {
      Linear2Drift ld{C1, d1, C2, d2, Eigen::VectorXd::Zero(n2)};
      if (s.has("offset")) ld.offset = as_evec(s.need("offset"), path + ".offset");
      d.form = ld;
    } else {
      d.form = Tanh2Drift{C1, d1, C2, d2};
    }
  } else {
    throw input_error("config: " + path + ".form: unknown drift form '" +
                      form + "'");
  }
  const auto [k1b, k2b] = drift2_lipschitz_bound(d);
  d.K1 = s.has("K1") ? as_num(s.need("K1"), path + ".K1") : k1b;
  d.K2 = s.has("K2") ? as_num(s.need("K2"), path + ".K2") : k2b;
  s.finish();
  return d;
}

void parse_run(const json& j, RunSection& run) {
  Scope s(j, "run");
  run.seed = as_u64(s.need("seed"), "run.seed");
  if (const json* v = s.get("m")) run.m = as_int(*v, "run.m");
  if (const json* v = s.get("T")) run.T = as_num(*v, "run.T"), run.has_T = true;
  if (const json* v = s.get("M")) run.M = as_i64(*v, "run.M"), run.has_M = true;
  if (const json* v = s.get("t0"))
    run.t0 = as_num(*v, "run.t0"), run.has_t0 = true;
  if (const json* v = s.get("t2"))
    run.t2 = as_num(*v, "run.t2"), run.has_t2 = true;
  if (const json* v = s.get("burn_in"))
    run.burn_in = as_num(*v, "run.burn_in"), run.has_burn_in = true;
  if (const json* v = s.get("eps"))
    run.eps = as_num(*v, "run.eps"), run.has_eps = true;
  if (const json* v = s.get("delta_reg")) run.delta_reg = as_num(*v, "run.delta_reg");
  if (const json* v = s.get("lam_frac")) run.lam_frac = as_num(*v, "run.lam_frac");
  if (const json* v = s.get("gap_x")) run.gap_x = as_num(*v, "run.gap_x");
  if (const json* v = s.get("gap_y")) run.gap_y = as_num(*v, "run.gap_y");
  if (const json* v = s.get("workers")) run.workers = as_int(*v, "run.workers");
  if (const json* v = s.get("record_every"))
    run.record_every = as_int(*v, "run.record_every");
  if (const json* v = s.get("eps_grid")) run.eps_grid = as_vec(*v, "run.eps_grid");
  if (const json* v = s.get("t_grid")) run.t_grid = as_vec(*v, "run.t_grid");
  if (const json* v = s.get("t1_grid")) run.t1_grid = as_vec(*v, "run.t1_grid");
  if (const json* v = s.get("r_grid")) run.r_grid = as_vec(*v, "run.r_grid");
  s.finish();

  require_input(run.m >= 1, "config: run.m must be >= 1");
  require_input(!run.has_M || run.M >= 1, "config: run.M must be >= 1");
  require_input(run.delta_reg > 0 && run.delta_reg < 1,
                "config: run.delta_reg must lie in (0, 1)");
  require_input(run.lam_frac > 0 && run.lam_frac < 1,
                "config: run.lam_frac must lie in (0, 1)");
  require_input(!run.has_eps || run.eps >= 0,
                "config: run.eps must be nonnegative");
  require_input(run.workers >= 1, "config: run.workers must be >= 1");
  require_input(run.record_every >= 0,
                "config: run.record_every must be >= 0");
}

void parse_checks(const json& j, ChecksSection& c) {
  Scope s(j, "checks");
  if (const json* v = s.get("noise_regularity"))
    c.noise_regularity = as_bool(*v, "checks.noise_regularity");
  if (const json* v = s.get("rate")) c.rate = as_bool(*v, "checks.rate");
  if (const json* v = s.get("gap")) c.gap = as_bool(*v, "checks.gap");
  if (const json* v = s.get("b3")) c.b3 = as_bool(*v, "checks.b3");
  if (const json* v = s.get("b4")) c.b4 = as_bool(*v, "checks.b4");
  s.finish();
}

void parse_output(const json& j, OutputSection& o) {
  Scope s(j, "output");
  if (const json* v = s.get("dir")) o.dir = as_str(*v, "output.dir");
  if (const json* v = s.get("formats")) {
    require_input(v->is_array(), "config: output.formats must be an array");
    o.formats.clear();
    for (size_t i = 0; i < v->size(); ++i) {
      const std::string f =
          as_str((*v)[i], "output.formats[" + std::to_string(i) + "]");
      require_input(f == "csv" || f == "txt",
                    "config: output.formats entries must be 'csv' or 'txt'");
      o.formats.push_back(f);
    }
  }
  s.finish();
}

json spectrum_json(const SpectralData& spec) {
  json out;
  out["lambda"] = spec.lambda;
  out["s"] = spec.s;
  if (spec.tail) {
    out["tail"] = {{"a", spec.tail->a},
                   {"p", spec.tail->p},
                   {"b", spec.tail->b},
                   {"q", spec.tail->q}};
  }
  return out;
}

json mat_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

json vec_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json drift_json(const DriftSpec& d, const SegmentGrid& grid) {
  json out;
  if (std::holds_alternative<ZeroDrift>(d.form)) {
    out["form"] = "zero";
  } else if (const auto* dd = std::get_if<DiscreteDelayDrift>(&d.form)) {
    out["form"] = "discrete";
    json taus = json::array(), coeff = json::array();
    for (size_t k = 0; k < dd->delay_nodes.size(); ++k) {
      taus.push_back(dd->delay_nodes[k] * grid.dt());
      coeff.push_back(mat_json(dd->coeff[k]));
    }
    out["taus"] = taus;
    out["coeff"] = coeff;
    out["offset"] = vec_json(dd->offset);
  } else if (const auto* dd = std::get_if<DistributedDelayDrift>(&d.form)) {
    out["form"] = "distributed";
    json taus = json::array();
    for (int node : dd->atom_nodes) taus.push_back(node * grid.dt());
    out["taus"] = taus;
    out["weights"] = dd->weights;
    out["gain"] = dd->gain;
  } else if (const auto* sf = std::get_if<SupFormDrift>(&d.form)) {
    out["form"] = "supform";
    out["weight_const"] = vec_json(sf->weight.row(0));
    out["direction"] = vec_json(sf->direction);
  }
  out["L"] = d.L;
  return out;
}

json drift2_json(const DriftSpec2& d, const SegmentGrid& grid) {
  json out;
  if (std::holds_alternative<Zero2Drift>(d.form)) {
    out["form"] = "zero";
  } else if (const auto* ld = std::get_if<Linear2Drift>(&d.form)) {
    out["form"] = "linear";
    out["C1"] = mat_json(ld->C1);
    out["tau1"] = ld->d1 * grid.dt();
    out["C2"] = mat_json(ld->C2);
    out["tau2"] = ld->d2 * grid.dt();
    out["offset"] = vec_json(ld->offset);
  } else if (const auto* td = std::get_if<Tanh2Drift>(&d.form)) {
    out["form"] = "tanh";
    out["C1"] = mat_json(td->C1);
    out["tau1"] = td->d1 * grid.dt();
    out["C2"] = mat_json(td->C2);
    out["tau2"] = td->d2 * grid.dt();
  }
  out["K1"] = d.K1;
  out["K2"] = d.K2;
  return out;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw input_error(std::string("config: not valid JSON: ") + e.what());
  }
  Scope top(j, "config");
  const json& mj = top.need("model");
  const json& rj = top.need("run");
  const json* cj = top.get("checks");
  const json* oj = top.get("output");
  top.finish();

  ExperimentConfig cfg;
  parse_run(rj, cfg.run);
  if (cj) parse_checks(*cj, cfg.checks);
  if (oj) parse_output(*oj, cfg.output);

  Scope ms(mj, "model");
  const std::string kind = as_str(ms.need("kind"), "model.kind");
  const double r0 = as_num(ms.need("r0"), "model.r0");
  SegmentGrid grid{r0, cfg.run.m};
  grid.validate();

  if (kind == "nondegenerate") {
    cfg.degenerate = false;
    cfg.nondeg.grid = grid;
    cfg.nondeg.spec = parse_spectrum(ms.need("spectrum"), "model.spectrum");
    cfg.nondeg.drift = parse_drift(ms.need("drift"), "model.drift", grid,
                                   cfg.nondeg.dim());
    ms.finish();
    cfg.nondeg.validate();
  } else if (kind == "degenerate") {
    cfg.degenerate = true;
    cfg.deg.grid = grid;
    cfg.deg.A1 = as_mat(ms.need("A1"), "model.A1");
    cfg.deg.B = as_mat(ms.need("B"), "model.B");
    cfg.deg.A0 = as_mat(ms.need("A0"), "model.A0");
    cfg.deg.spec2 = parse_spectrum(ms.need("spectrum2"), "model.spectrum2");
    cfg.deg.sigma_inv = as_vec(ms.need("sigma_inv"), "model.sigma_inv");
    cfg.deg.delta = as_num(ms.need("delta"), "model.delta");
    cfg.deg.drift = parse_drift2(ms.need("drift2"), "model.drift2", grid,
                                 cfg.deg.n2());
    ms.finish();
    require_input(cfg.deg.B.rows() == cfg.deg.A1.rows(),
                  "config: model.B row count must match model.A1");
    cfg.deg.validate();
  } else {
    throw input_error("config: model.kind must be 'nondegenerate' or "
                      "'degenerate', got '" + kind + "'");
  }
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require_input(in.good(), "config: cannot read file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  json j;
  json& m = j["model"];
  if (!cfg.degenerate) {
    m["kind"] = "nondegenerate";
    m["r0"] = cfg.nondeg.grid.r0;
    m["spectrum"] = spectrum_json(cfg.nondeg.spec);
    m["drift"] = drift_json(cfg.nondeg.drift, cfg.nondeg.grid);
  } else {
    m["kind"] = "degenerate";
    m["r0"] = cfg.deg.grid.r0;
    m["A1"] = mat_json(cfg.deg.A1);
    m["B"] = mat_json(cfg.deg.B);
    m["A0"] = mat_json(cfg.deg.A0);
    m["spectrum2"] = spectrum_json(cfg.deg.spec2);
    m["sigma_inv"] = cfg.deg.sigma_inv;
    m["delta"] = cfg.deg.delta;
    m["drift2"] = drift2_json(cfg.deg.drift, cfg.deg.grid);
  }

  json& r = j["run"];
  r["seed"] = cfg.run.seed;
  r["m"] = cfg.run.m;
  if (cfg.run.has_T) r["T"] = cfg.run.T;
  if (cfg.run.has_M) r["M"] = cfg.run.M;
  if (cfg.run.has_t0) r["t0"] = cfg.run.t0;
  if (cfg.run.has_t2) r["t2"] = cfg.run.t2;
  if (cfg.run.has_burn_in) r["burn_in"] = cfg.run.burn_in;
  if (cfg.run.has_eps) r["eps"] = cfg.run.eps;
  r["delta_reg"] = cfg.run.delta_reg;
  r["lam_frac"] = cfg.run.lam_frac;
  r["gap_x"] = cfg.run.gap_x;
  r["gap_y"] = cfg.run.gap_y;
  r["workers"] = cfg.run.workers;
  r["record_every"] = cfg.run.record_every;
  if (!cfg.run.eps_grid.empty()) r["eps_grid"] = cfg.run.eps_grid;
  if (!cfg.run.t_grid.empty()) r["t_grid"] = cfg.run.t_grid;
  if (!cfg.run.t1_grid.empty()) r["t1_grid"] = cfg.run.t1_grid;
  if (!cfg.run.r_grid.empty()) r["r_grid"] = cfg.run.r_grid;

  json& c = j["checks"];
  c["noise_regularity"] = cfg.checks.noise_regularity;
  c["rate"] = cfg.checks.rate;
  c["gap"] = cfg.checks.gap;
  c["b3"] = cfg.checks.b3;
  c["b4"] = cfg.checks.b4;

  json& o = j["output"];
  o["dir"] = cfg.output.dir;
  o["formats"] = cfg.output.formats;

  return j.dump(2);
}

uint64_t config_hash(const ExperimentConfig& cfg) {
  // Identifies the experiment: where the files land is not part of it.
  ExperimentConfig keyed = cfg;
  keyed.output = OutputSection{};
  const std::string s = serialize_config(keyed);
  uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace fsl
