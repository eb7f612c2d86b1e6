#pragma once

#include <string>
#include <vector>

#include "contlab/continuation.hpp"
#include "contlab/system.hpp"

namespace contlab {

enum class CheckOutcome { Pass, Fail, NotApplicable };

const char* outcome_name(CheckOutcome o);

/// One evaluated inequality: observed <= bound up to the slack
/// 1e-10 * (1 + |bound|). Lower bounds are folded into the same convention by
/// negating both sides, so margin = bound - observed always and pass means
/// margin >= -slack.
struct CheckResult {
  std::string name;
  double bound = 0.0;
  double observed = 0.0;
  double margin = 0.0;
  CheckOutcome outcome = CheckOutcome::NotApplicable;
};

struct MonitorReport {
  double t = 0.0;
  int rung = -1;
  std::vector<CheckResult> checks;

  bool all_passed() const;  // NotApplicable entries do not count as failures
  const CheckResult* find(const std::string& name) const;
};

/// Maximum-principle bounds on the two potentials:
/// (1/t - lambda) * sup|phi| <= sup|f| + sup|fhat| and
/// sup|f| / t <= kappa * sup|tr_omega alpha_hat|.
MonitorReport check_potential_bounds(const ContinuityState& state, const ProblemSetup& setup,
                                     double kappa);

/// With alpha_hat >= 0 node-wise and a derived (compatible) source: tau >= 0
/// and R >= n (lambda - 1/t). NotApplicable when some node of alpha_hat has a
/// negative eigenvalue or the source potential was prescribed directly.
MonitorReport check_scalar_lower_bound(const ContinuityState& state,
                                       const ProblemSetup& setup);

/// Reports the equivalence constant C with C^-1 background <= omega <= C
/// background; informational (the constant is empirical, not proved).
MonitorReport check_metric_equivalence(const ContinuityState& state,
                                       const ProblemSetup& setup);

/// Sequence-level growth guard on the equivalence constant: flags
/// C_{k+1} > 1.5 C_k after rung 5, and reports the plateau spread of the
/// last three rungs.
MonitorReport check_equivalence_growth(const std::vector<RungRecord>& rungs);

/// Surface-mode a priori bounds with the explicit constants of the
/// negative-curvature estimates: upper and lower bounds on e^{-u}, the
/// two-sided trace bound, and |R| <= C (1 + 1/t) with C assembled from the
/// other three.
MonitorReport check_conformal_bounds(const ContinuityState& state, const ProblemSetup& setup);

struct CompressionResult {
  bool compressed = false;  // false: input already satisfies the strict window
  double s = 1.0;           // applied compression factor
  ScalarField tauhat;       // compressed (or original) field
};

/// Gate for the surface hypotheses. Verifies rhat_max < tau_bar < -rhat_max
/// (throws A1Violated otherwise); when the strict oscillation hypothesis
/// tauhat_max+ - tauhat_min- < -rhat_max fails, compresses tauhat towards its
/// volume average with the largest s in (0, 1] putting every node strictly
/// inside (rhat_max / 2, -rhat_max / 2). The average is untouched, so the
/// conserved integral of tauhat is preserved exactly.
CompressionResult check_a1_and_compress(const ScalarField& tauhat, const ScalarField& rhat,
                                        const KahlerMetricField& background);

/// Ricci-flat-class linear-growth bound: sup|phi| <= C t with
/// C <= sup|fhat| (+ 1e-8 numerical headroom), and the per-rung C_k = |phi|/t
/// stops growing after the first few rungs. Needs alpha_hat = 0 and
/// lambda = 0; NotApplicable otherwise.
MonitorReport check_ct_bound(const std::vector<ContinuityState>& states,
                             const ProblemSetup& setup);

}  // namespace contlab
