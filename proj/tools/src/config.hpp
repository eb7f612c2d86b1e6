#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "contlab/continuation.hpp"
#include "contlab/system.hpp"
#include "contlab/trig.hpp"

namespace contlab::cli {

/// Everything a run needs, parsed from the INI-style config. Trig expressions
/// are lists of `term = k... amplitude phase` lines with one wave number per
/// real axis.
struct RunConfig {
  // [run]
  std::string mode = "coupled";  // coupled | ke | conformal
  std::string output = "out";
  bool emit_snapshots = false;
  std::uint64_t seed = 1;
  bool has_lambda_override = false;
  double lambda_override = 0.0;

  // [grid]
  int n = 1;
  int points = 0;  // 0 selects the mode default

  // [background]
  std::string background_kind = "flat";  // flat | conformal | snapshot
  double background_scale = 1.0;
  std::vector<TrigTerm> background_terms;  // log conformal factor
  std::string background_path;

  // [alpha]
  std::string alpha_kind = "zero";  // zero | trig | snapshot
  double alpha_constant = 0.0;      // multiple of the background form
  std::vector<TrigTerm> alpha_terms;  // potential whose hessian is added
  std::string alpha_path;

  // [fhat]
  std::string fhat_kind = "zero";  // zero | trig | random
  std::vector<TrigTerm> fhat_terms;
  double fhat_amplitude = 0.1;
  int fhat_max_mode = 3;

  // [conformal]
  double rhat_constant = 0.0;
  std::vector<TrigTerm> rhat_terms;
  double tauhat_constant = 0.0;
  std::vector<TrigTerm> tauhat_terms;
  bool compress = false;

  LadderSchedule schedule;  // [schedule]
  SolverConfig solver;      // [solver]
};

/// Parses and validates; throws ConfigError carrying the offending line.
RunConfig parse_config(const std::string& path);

struct BuiltProblem {
  ProblemSetup setup;
  SolverConfig solver;
  LadderSchedule schedule;
  bool compressed = false;
  double compression_s = 1.0;
};

/// Materializes fields and class data from the parsed config. Applies the
/// lambda-override compatibility gate and (conformal) optional source
/// compression.
BuiltProblem build_problem(const RunConfig& rc);

/// CONTLAB_THREADS when set (floor 1), otherwise the hardware concurrency.
int thread_limit();

}  // namespace contlab::cli
