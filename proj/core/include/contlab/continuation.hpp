#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "contlab/system.hpp"

namespace contlab {

struct LadderSchedule {
  double t0 = 0.1;
  double ratio = 1.5;
  double t_max = 1e4;
  double stationarity_tol = 1e-6;

  void validate() const;  // t0 > 0, ratio > 1, t_max > t0
};

enum class Verdict { Converged, Undecided, Failed };

const char* verdict_name(Verdict v);

/// Everything observed at one accepted rung. equivalence_c is the smallest C
/// with C^-1 background <= omega <= C background over all nodes.
struct RungRecord {
  int index = 0;
  double t = 0.0;
  bool inserted_retry = false;  // extra rung from a cone-exit retry
  double residual_joint = 0.0;
  double stationarity_first = 0.0;
  double stationarity_second = 0.0;
  double eig_min = 0.0;
  double eig_max = 0.0;
  double equivalence_c = 0.0;
  ClassConservationEntry classes;
  double phi_sup = 0.0;
  double f_sup = 0.0;
  double tau_sup = 0.0;
  SolveStats stats;
  bool monotone_warning = false;  // stationarity grew past the slack factor
};

/// Pre-solve hook, called with the rung index and target t before every solve
/// attempt. May throw ConeExit to drive the retry path from tests.
using RungObserver = std::function<void(int rung, double t)>;

struct LadderResult {
  Verdict verdict = Verdict::Undecided;
  std::vector<ContinuityState> states;
  std::vector<RungRecord> rungs;
  std::string failure;     // Failed only: annotated solver error
  double failure_t = 0.0;  // Failed only: the rung that broke
  bool monotone_warning = false;
  ClassConservationReport conservation;
};

LadderResult run_ladder(const ProblemSetup& setup, const LadderSchedule& schedule,
                        const SolverConfig& config, const TelemetrySink& sink = nullptr,
                        const RungObserver& observer = nullptr);

/// Exact symmetry of the system: omega -> omega / M, alpha fixed, t -> t / M,
/// lambda -> M lambda, kappa fixed. Returns the transformed problem and state;
/// re-solving the transformed problem at t / M reproduces the transformed
/// state to solver tolerance.
std::pair<ProblemSetup, ContinuityState> scaling_transform(const ProblemSetup& setup,
                                                           const ContinuityState& state,
                                                           double M);

/// Final-rung fields plus the diagnostics convergence is judged by.
struct LimitData {
  KahlerMetricField omega;
  HermitianFormField alpha;
  ScalarField tau;
  ScalarField scalar_curv;
  double cauchy_phi = 0.0;  // sup distance between the last two rungs
  double cauchy_f = 0.0;
  double stationarity_first = 0.0;
  double stationarity_second = 0.0;
  double tau_mean = 0.0;
  double tau_oscillation = 0.0;  // sup - inf, 0 for an exactly constant trace
  double scalar_mean = 0.0;
  double scalar_oscillation = 0.0;
};

/// Throws unless the run converged.
LimitData extract_limit(const LadderResult& result);

}  // namespace contlab
