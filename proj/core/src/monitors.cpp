#include "contlab/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "contlab/errors.hpp"
#include "contlab/kahler.hpp"

namespace contlab {
namespace {

double slack_for(double bound) { return 1e-10 * (1.0 + std::abs(bound)); }

CheckResult upper(const std::string& name, double observed, double bound) {
  CheckResult r;
  r.name = name;
  r.bound = bound;
  r.observed = observed;
  r.margin = bound - observed;
  r.outcome = (r.margin >= -slack_for(bound)) ? CheckOutcome::Pass : CheckOutcome::Fail;
  return r;
}

// value >= floor, folded into the upper-bound convention by negating both
// sides so that margin keeps its meaning (distance to violation).
CheckResult lower(const std::string& name, double value, double floor) {
  return upper(name, -value, -floor);
}

CheckResult skipped(const std::string& name) {
  CheckResult r;
  r.name = name;
  r.outcome = CheckOutcome::NotApplicable;
  return r;
}

double field_min(const ScalarField& f) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < f.values.size(); ++i) m = std::min(m, f.real_at(i));
  return m;
}

double field_max(const ScalarField& f) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < f.values.size(); ++i) m = std::max(m, f.real_at(i));
  return m;
}

// Node-wise positive semidefiniteness of a Hermitian coefficient matrix, with
// a small relative tolerance so exact zeros and round-off stored forms pass.
bool form_nonnegative(const HermitianFormField& h) {
  const double tol = 1e-12 * (1.0 + sup_abs(h));
  const std::size_t nodes = h.grid.total_nodes();
  if (h.grid.n == 1) {
    for (std::size_t i = 0; i < nodes; ++i)
      if (h.at(i, 0, 0).real() < -tol) return false;
    return true;
  }
  for (std::size_t i = 0; i < nodes; ++i) {
    const double a = h.at(i, 0, 0).real();
    const double d = h.at(i, 1, 1).real();
    const double det = a * d - std::norm(h.at(i, 0, 1));
    if (a < -tol || d < -tol || det < -tol * tol - tol * (a + d)) return false;
  }
  return true;
}

}  // namespace

const char* outcome_name(CheckOutcome o) {
  switch (o) {
    case CheckOutcome::Pass: return "pass";
    case CheckOutcome::Fail: return "fail";
    case CheckOutcome::NotApplicable: return "n/a";
  }
  return "?";
}

bool MonitorReport::all_passed() const {
  for (const auto& c : checks)
    if (c.outcome == CheckOutcome::Fail) return false;
  return true;
}

const CheckResult* MonitorReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

MonitorReport check_potential_bounds(const ContinuityState& state, const ProblemSetup& setup,
                                     double kappa) {
  MonitorReport rep;
  rep.t = state.t;
  if (state.mode == SystemMode::Conformal) {
    rep.checks.push_back(skipped("potential-phi"));
    rep.checks.push_back(skipped("potential-f"));
    return rep;
  }
  const double lambda = setup.classes.lambda;
  const double f_sup = sup_norm(state.f);
  rep.checks.push_back(upper("potential-phi", (1.0 / state.t - lambda) * sup_norm(state.phi),
                             f_sup + sup_norm(setup.fhat)));
  rep.checks.push_back(upper("potential-f", f_sup / state.t,
                             kappa * sup_norm(trace(state.omega, setup.alpha_hat))));
  return rep;
}

MonitorReport check_scalar_lower_bound(const ContinuityState& state,
                                       const ProblemSetup& setup) {
  MonitorReport rep;
  rep.t = state.t;
  // A prescribed source twists the flow by its own Hessian, which shifts the
  // curvature floor by an amount the estimate does not cover; only derived
  // (compatible) sources with a nonnegative companion form are in scope.
  if (setup.fhat_prescribed || !form_nonnegative(setup.alpha_hat)) {
    rep.checks.push_back(skipped("trace-lower"));
    rep.checks.push_back(skipped("scalar-lower"));
    return rep;
  }
  const double lambda = setup.classes.lambda;
  const double n = static_cast<double>(setup.grid.n);
  rep.checks.push_back(lower("trace-lower", field_min(state.tau), 0.0));
  rep.checks.push_back(
      lower("scalar-lower", field_min(state.scalar_curv), n * (lambda - 1.0 / state.t)));
  return rep;
}

MonitorReport check_metric_equivalence(const ContinuityState& state,
                                       const ProblemSetup& setup) {
  MonitorReport rep;
  rep.t = state.t;
  auto [emin, emax] = eigen_bounds(setup.background, state.omega);
  const double c = std::max(emax, 1.0 / emin);
  // Informational: the constant itself is the payload, recorded as both sides.
  rep.checks.push_back(upper("equivalence-constant", c, c));
  return rep;
}

MonitorReport check_equivalence_growth(const std::vector<RungRecord>& rungs) {
  MonitorReport rep;
  if (!rungs.empty()) {
    rep.t = rungs.back().t;
    rep.rung = rungs.back().index;
  }
  bool any_ratio = false;
  double worst = 0.0;
  for (std::size_t k = 1; k < rungs.size(); ++k) {
    if (rungs[k].index <= 5) continue;
    any_ratio = true;
    worst = std::max(worst, rungs[k].equivalence_c / rungs[k - 1].equivalence_c);
  }
  rep.checks.push_back(any_ratio ? upper("equivalence-growth", worst, 1.5)
                                 : skipped("equivalence-growth"));
  if (rungs.size() >= 3) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t k = rungs.size() - 3; k < rungs.size(); ++k) {
      lo = std::min(lo, rungs[k].equivalence_c);
      hi = std::max(hi, rungs[k].equivalence_c);
    }
    rep.checks.push_back(upper("equivalence-plateau", hi - lo, 1e-3));
  } else {
    rep.checks.push_back(skipped("equivalence-plateau"));
  }
  return rep;
}

MonitorReport check_conformal_bounds(const ContinuityState& state, const ProblemSetup& setup) {
  MonitorReport rep;
  rep.t = state.t;
  const char* names[] = {"conformal-einv-upper", "conformal-trace-lower",
                         "conformal-trace-upper", "conformal-einv-lower", "conformal-scalar"};
  const double rmax = field_max(setup.rhat);
  const double rmin = field_min(setup.rhat);
  const double tplus = std::max(field_max(setup.tauhat), 0.0);
  const double tminus = std::min(field_min(setup.tauhat), 0.0);
  const bool applicable =
      state.mode == SystemMode::Conformal && (tplus - tminus < -rmax);
  if (!applicable) {
    for (const char* n : names) rep.checks.push_back(skipped(n));
    return rep;
  }
  const double lambda = setup.classes.lambda;
  const double denom = rmax - tminus;  // < 0 under the oscillation hypothesis
  const double b1 = lambda / denom;
  const double trace_lo = lambda * tminus / denom;
  const double trace_hi = lambda * tplus / denom;
  const double b3 = std::min((lambda + trace_hi) / rmin, 1.0);

  double einv_max = 0.0, einv_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < setup.grid.total_nodes(); ++i) {
    const double e = std::exp(-state.phi.real_at(i));
    einv_max = std::max(einv_max, e);
    einv_min = std::min(einv_min, e);
  }
  rep.checks.push_back(upper(names[0], einv_max, b1));
  rep.checks.push_back(lower(names[1], field_min(state.tau), trace_lo));
  rep.checks.push_back(upper(names[2], field_max(state.tau), trace_hi));
  rep.checks.push_back(lower(names[3], einv_min, b3));

  // |R| = |lambda + tau - (1 - e^{-u})/t| on solutions; bound it through the
  // proved windows: |tau| <= T, 0 < e^{-u} <= b1 so |1 - e^{-u}| <= max(b1-1, 1).
  const double trace_abs = std::max(std::abs(trace_lo), std::abs(trace_hi));
  const double c = std::max(std::abs(lambda) + trace_abs, std::max(b1 - 1.0, 1.0));
  rep.checks.push_back(
      upper(names[4], sup_norm(state.scalar_curv), c * (1.0 + 1.0 / state.t)));
  return rep;
}

CompressionResult check_a1_and_compress(const ScalarField& tauhat, const ScalarField& rhat,
                                        const KahlerMetricField& background) {
  const double rmax = field_max(rhat);
  const double tau_bar = volume_mean(background, tauhat);
  if (!(rmax < tau_bar && tau_bar < -rmax))
    throw A1Violated("average prescribed trace " + std::to_string(tau_bar) +
                     " lies outside the admissible window (" + std::to_string(rmax) + ", " +
                     std::to_string(-rmax) + ")");

  CompressionResult out;
  out.tauhat = tauhat;
  const double tplus = std::max(field_max(tauhat), 0.0);
  const double tminus = std::min(field_min(tauhat), 0.0);
  if (tplus - tminus < -rmax) return out;  // strict hypothesis already holds

  const double lo = 0.5 * rmax - tau_bar;  // compressed values must stay above
  const double hi = -0.5 * rmax - tau_bar;  // ... and below, relative to the mean
  if (!(lo < 0.0 && hi > 0.0))
    throw A1Violated("average prescribed trace " + std::to_string(tau_bar) +
                     " lies outside the compressed window (" + std::to_string(0.5 * rmax) +
                     ", " + std::to_string(-0.5 * rmax) + ")");
  const double dplus = field_max(tauhat) - tau_bar;
  const double dminus = field_min(tauhat) - tau_bar;
  double s_sup = std::numeric_limits<double>::infinity();
  if (dplus > 0.0) s_sup = std::min(s_sup, hi / dplus);
  if (dminus < 0.0) s_sup = std::min(s_sup, lo / dminus);
  const double s = std::min(1.0, (1.0 - 1e-9) * s_sup);

  out.compressed = true;
  out.s = s;
  out.tauhat = map_field(tauhat,
                         [&](cplx v) { return cplx(tau_bar + s * (v.real() - tau_bar), 0.0); });
  return out;
}

MonitorReport check_ct_bound(const std::vector<ContinuityState>& states,
                             const ProblemSetup& setup) {
  MonitorReport rep;
  if (!states.empty()) rep.t = states.back().t;
  const bool applicable = states.size() >= 2 && sup_abs(setup.alpha_hat) == 0.0 &&
                          std::abs(setup.classes.lambda) <= 1e-13;
  if (!applicable) {
    rep.checks.push_back(skipped("ct-linearity"));
    rep.checks.push_back(skipped("ct-constant"));
    return rep;
  }
  std::vector<double> c;
  c.reserve(states.size());
  for (const auto& st : states) c.push_back(sup_norm(st.phi) / st.t);

  bool any_ratio = false;
  double worst = 0.0;
  for (std::size_t k = 4; k < c.size(); ++k) {  // settle-in window: skip rungs 0..3
    any_ratio = true;
    const double ratio = (c[k - 1] > 0.0) ? c[k] / c[k - 1] : (c[k] > 0.0 ? 2.0 : 1.0);
    worst = std::max(worst, ratio);
  }
  rep.checks.push_back(any_ratio ? upper("ct-linearity", worst, 1.0 + 1e-3)
                                 : skipped("ct-linearity"));
  rep.checks.push_back(
      upper("ct-constant", *std::max_element(c.begin(), c.end()), sup_norm(setup.fhat) + 1e-8));
  return rep;
}

}  // namespace contlab
