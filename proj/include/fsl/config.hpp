#pragma once

// Experiment configuration: strict JSON ingestion (unknown keys are
// errors, every message names the offending key path), canonical
// re-serialization, and a stable content hash.
//
// Exactly one model kind per file.  The run section owns everything
// stochastic or horizon-like; the model section owns the equation.

#include <cstdint>
#include <string>
#include <vector>

#include "fsl/model.hpp"

namespace fsl {

struct RunSection {
  uint64_t seed = 0;  // required key
  int m = 64;         // dt divisor: dt = r0 / m

  double T = 0;
  int64_t M = 0;
  double t0 = 0;       // coupling / window horizon
  double t2 = 0;       // later time for two-start gap runs
  double burn_in = 0;  // invariant sampling; <= 0 means 10 / rate
  double eps = 0;      // exponential-moment exponent
  bool has_T = false, has_M = false, has_t0 = false, has_t2 = false,
       has_burn_in = false, has_eps = false;

  double delta_reg = 0.2;  // regularity exponent for noise / tail checks
  double lam_frac = 0.9;   // tail-bound rate as a fraction of lambda_tilde
  double gap_x = 0.1;      // initial pair offset, first coordinate
  double gap_y = 0.1;
  int workers = 1;
  int record_every = 1;

  std::vector<double> eps_grid;  // concentration exponents
  std::vector<double> t_grid;    // concentration times
  std::vector<double> t1_grid;   // two-start gap first times
  std::vector<double> r_grid;    // tail levels; empty = threshold multiples
};

struct ChecksSection {
  bool noise_regularity = true;
  bool rate = true;  // nondegenerate contraction rate
  bool gap = true;   // degenerate lambda' vs spectral gap
  bool b3 = true;
  bool b4 = true;
};

struct OutputSection {
  std::string dir = "out";
  std::vector<std::string> formats = {"csv", "txt"};
};

struct ExperimentConfig {
  bool degenerate = false;
  NondegenerateModel nondeg;  // meaningful iff !degenerate
  DegenerateModel deg;        // meaningful iff degenerate
  RunSection run;
  ChecksSection checks;
  OutputSection output;
};

ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& json_text);

// Canonical form: spectra resolved to explicit arrays, declared
// constants filled in, keys sorted.  parse(serialize(c)) reproduces c
// and serialize is then a fixed point.
std::string serialize_config(const ExperimentConfig& cfg);

// FNV-1a over the canonical serialization.
uint64_t config_hash(const ExperimentConfig& cfg);

}  // namespace fsl
