// End-to-end checks for the continuity-ladder toolkit, one verdict line per
// criterion. Exit status is the number of failed criteria.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "contlab/classes.hpp"
#include "contlab/continuation.hpp"
#include "contlab/errors.hpp"
#include "contlab/kahler.hpp"
#include "contlab/monitors.hpp"
#include "contlab/oracle.hpp"
#include "contlab/spectral.hpp"
#include "contlab/system.hpp"
#include "contlab/trig.hpp"

using namespace contlab;

namespace {

constexpr double kPi = 3.14159265358979323846;

int g_failures = 0;

void record(int id, bool ok, const std::string& detail) {
  std::printf("criterion %02d  %s  %s\n", id, ok ? "pass" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

GridSpec grid1(int points) {
  GridSpec g;
  g.n = 1;
  g.points_per_axis = points;
  return g;
}

TrigTerm wv(std::array<int, kMaxAxes> k, double amp, double phase = 0.0) {
  TrigTerm t;
  t.wave = k;
  t.amplitude = amp;
  t.phase = phase;
  return t;
}

ScalarField cosx(const GridSpec& g, double amp) {
  return evaluate_trig(g, {wv({1, 0}, amp, 0.0)});
}

ScalarField sinx(const GridSpec& g, double amp) {
  return evaluate_trig(g, {wv({1, 0}, amp, -0.5 * kPi)});
}

double field_min(const ScalarField& f) {
  double m = f.values[0].real();
  for (const cplx& v : f.values) m = std::min(m, v.real());
  return m;
}

double field_max(const ScalarField& f) {
  double m = f.values[0].real();
  for (const cplx& v : f.values) m = std::max(m, v.real());
  return m;
}

// The torus coupled reference problem: a half-size copy of the background
// class plus a tiny potential ripple, so tau_bar = 0.5 > 0 and lambda = -0.5.
ProblemSetup reference_setup(const GridSpec& g, bool mixed_waves) {
  KahlerMetricField bg = flat_metric(g);
  ScalarField pot = mixed_waves
                        ? evaluate_trig(g, {wv({1, 0}, 2e-4, 0.0), wv({1, 1}, 1e-4, -0.3)})
                        : cosx(g, 2e-4);
  return make_coupled_setup(bg, add(scaled(bg.g, 0.5), complex_hessian(pot)));
}

LadderSchedule reference_schedule() {
  LadderSchedule s;
  s.t0 = 0.1;
  s.ratio = 2.0;
  s.t_max = 1e3;
  // The raw limit identities trail the corrected stationarity residual by a
  // constant factor, so the stop tolerance sits a decade below the target.
  s.stationarity_tol = 1e-7;
  return s;
}

// Shared across criteria 1, 2, 7, 9.
struct SharedRuns {
  ProblemSetup setup128;
  LadderResult run128;
  std::vector<ClassConservationReport> conservation;
  bool run128_ok = false;
} shared;

void criterion_1_torus_convergence() {
  auto t0 = std::chrono::steady_clock::now();
  GridSpec g = grid1(128);
  shared.setup128 = reference_setup(g, false);
  const ProblemSetup& setup = shared.setup128;

  shared.run128 = run_ladder(setup, reference_schedule(), SolverConfig{});
  const LadderResult& r = shared.run128;
  shared.conservation.push_back(r.conservation);
  double elapsed = seconds_since(t0);

  if (r.verdict != Verdict::Converged) {
    record(1, false, fmt("verdict %s after %.0fs", verdict_name(r.verdict), elapsed));
    return;
  }
  shared.run128_ok = true;
  LimitData lim = extract_limit(r);
  double lambda = setup.classes.lambda;
  double pair_sup =
      form_sup_vs(setup.background, add(lim.alpha, scaled(lim.omega.g, lambda)));
  double ricci_sup = form_sup_vs(setup.background, ricci(lim.omega));
  double tau_err = std::abs(lim.tau_mean - (-lambda));

  // Warm starts must not cost more Newton work than a cold solve at the
  // final rung.
  int warm = r.rungs.back().stats.newton_iterations;
  ContinuityState cold = solve_coupled(r.rungs.back().t, setup, make_field(g),
                                       make_field(g), SolverConfig{});
  bool warm_ok = warm <= cold.stats.newton_iterations;

  bool ok = r.rungs.back().t <= 1e3 && lim.stationarity_first <= 1e-6 &&
            lim.stationarity_second <= 1e-6 && pair_sup <= 1e-6 && ricci_sup <= 1e-6 &&
            lim.tau_oscillation <= 1e-6 && tau_err <= 1e-6 && warm_ok && elapsed <= 300.0;
  record(1, ok,
         fmt("t %.4g  stat (%.2e, %.2e)  |a+Lw| %.2e  |Ric| %.2e  tau %.2e  "
             "newton %d<=%d  %.0fs",
             r.rungs.back().t, lim.stationarity_first, lim.stationarity_second, pair_sup,
             ricci_sup, tau_err, warm, cold.stats.newton_iterations, elapsed));
}

void criterion_2_potential_margins() {
  if (!shared.run128_ok) {
    record(2, false, "skipped: reference run did not converge");
    return;
  }
  double worst = 1e30;
  bool ok = true;
  for (const ContinuityState& st : shared.run128.states) {
    MonitorReport rep = check_potential_bounds(st, shared.setup128, 1.0);
    for (const CheckResult& c : rep.checks) {
      if (c.outcome == CheckOutcome::NotApplicable) continue;
      double slack = 1e-10 * (1.0 + std::abs(c.bound));
      if (c.margin < -slack) ok = false;
      worst = std::min(worst, c.margin);
    }
  }
  record(2, ok, fmt("%zu rungs, worst margin %.3e", shared.run128.states.size(), worst));
}

void criterion_3_scalar_floor() {
  GridSpec g = grid1(128);
  ProblemSetup setup = reference_setup(g, true);

  // The companion form must be positive node-wise for the floor to apply.
  KahlerMetricField as_metric;
  if (!try_make_metric(setup.alpha_hat, as_metric)) {
    record(3, false, "fixture companion form is not node-wise positive");
    return;
  }

  // Only the per-rung floors are asserted here, so the ladder can stop at
  // the standard tolerance.
  LadderSchedule sch = reference_schedule();
  sch.stationarity_tol = 1e-6;
  LadderResult r = run_ladder(setup, sch, SolverConfig{});
  shared.conservation.push_back(r.conservation);
  if (r.verdict != Verdict::Converged) {
    record(3, false, fmt("verdict %s", verdict_name(r.verdict)));
    return;
  }
  double worst_tau = 1e30, worst_r = 1e30;
  bool ok = true;
  for (const ContinuityState& st : r.states) {
    double tau_min = field_min(st.tau);
    double r_min = field_min(st.scalar_curv);
    double floor = double(g.n) * (setup.classes.lambda - 1.0 / st.t);
    worst_tau = std::min(worst_tau, tau_min);
    worst_r = std::min(worst_r, r_min - floor);
    if (tau_min < -1e-10 || r_min < floor - 1e-10) ok = false;
  }
  record(3, ok, fmt("min tau %.3e  min (R - floor) %.3e over %zu rungs", worst_tau,
                    worst_r, r.states.size()));
}

void criterion_4_ricci_flat_mode() {
  GridSpec g = grid1(64);
  KahlerMetricField bg = flat_metric(g);
  ProblemSetup setup = make_ke_setup_prescribed(bg, random_trig(g, 2026, 3, 0.1), 0.0);

  LadderSchedule sch;
  sch.t0 = 0.1;
  sch.ratio = 2.0;
  sch.t_max = 100.0;
  LadderResult r = run_ladder(setup, sch, SolverConfig{});
  shared.conservation.push_back(r.conservation);

  bool linear_ok = r.verdict != Verdict::Failed && !r.states.empty();
  double worst = -1e30;
  double cap = sup_norm(setup.fhat);
  for (const ContinuityState& st : r.states) {
    double excess = sup_norm(st.phi) - cap * st.t;
    worst = std::max(worst, excess);
    if (excess > 1e-10 * (1.0 + cap * st.t)) linear_ok = false;
  }

  // Twisted manufactured recovery across four decades of t.
  ScalarField phi_star = evaluate_trig(g, {wv({1, 0}, 0.05, 0.0), wv({0, 1}, 0.02, 1.1)});
  double worst_rec = 0.0;
  bool recover_ok = true;
  for (double t : {0.1, 1.0, 10.0, 100.0}) {
    oracle::ManufacturedCoupled fix = oracle::manufacture_ke(bg, phi_star, t, -0.7);
    ContinuityState st = solve_ke(t, fix.setup, make_field(g), SolverConfig{});
    double err = sup_norm(sub(st.phi, fix.phi_star));
    worst_rec = std::max(worst_rec, err);
    if (err > 1e-8) recover_ok = false;
  }
  record(4, linear_ok && recover_ok,
         fmt("growth excess %.3e over %zu rungs, twisted recovery %.3e", worst,
             r.states.size(), worst_rec));
}

void criterion_5_conformal_suite() {
  GridSpec g = grid1(128);
  KahlerMetricField bg = flat_metric(g);
  ScalarField rhat = shifted(cosx(g, 0.3), -1.0);
  ScalarField tauhat = sinx(g, 0.1);

  CompressionResult gate = check_a1_and_compress(tauhat, rhat, bg);
  bool ok = !gate.compressed;  // 0.2 < 0.7: strict hypothesis already holds
  std::string detail = gate.compressed ? "hypothesis check unexpectedly compressed " : "";

  // The surface-mode gaps decay like osc(e^u)/t with an order-one
  // oscillation, and the trace part carries an extra 1/kappa, so micro-level
  // limit quality for the smallest kappa needs t in the millions.
  LadderSchedule sch;
  sch.t0 = 0.1;
  sch.ratio = 1.5;
  sch.t_max = 2e7;
  sch.stationarity_tol = 1e-7;

  double worst_id = 0.0, worst_osc = 0.0;
  for (double kappa : {0.5, 1.0, 2.0}) {
    ProblemSetup setup = make_conformal_setup(bg, rhat, tauhat);
    SolverConfig cfg;
    cfg.kappa = kappa;
    LadderResult r = run_ladder(setup, sch, cfg);
    shared.conservation.push_back(r.conservation);
    if (r.verdict != Verdict::Converged) {
      ok = false;
      detail += fmt("kappa %.1f %s ", kappa, verdict_name(r.verdict));
      continue;
    }
    for (const ContinuityState& st : r.states) {
      MonitorReport rep = check_conformal_bounds(st, setup);
      for (const CheckResult& c : rep.checks)
        if (c.outcome == CheckOutcome::Fail) {
          ok = false;
          detail += fmt("kappa %.1f %s fails at t %.3g ", kappa, c.name.c_str(), st.t);
        }
    }
    const ContinuityState& last = r.states.back();
    double osc = field_max(last.scalar_curv) - field_min(last.scalar_curv);
    ScalarField ident = zip_fields(
        last.scalar_curv, last.tau,
        [&](cplx rr, cplx tt) { return rr - cplx(setup.classes.lambda, 0.0) - tt; },
        FieldKind::Real);
    double id_sup = sup_norm(ident);
    worst_osc = std::max(worst_osc, osc);
    worst_id = std::max(worst_id, id_sup);
    if (osc > 1e-6 || id_sup > 1e-6) ok = false;
  }

  // Source compression leg: tauhat x 20 violates the strict window.
  CompressionResult squeezed = check_a1_and_compress(sinx(g, 2.0), rhat, bg);
  bool comp_ok = squeezed.compressed && squeezed.s <= 0.175;
  ProblemSetup csetup = make_conformal_setup(bg, rhat, squeezed.tauhat);
  LadderResult cr = run_ladder(csetup, sch, SolverConfig{});
  shared.conservation.push_back(cr.conservation);
  comp_ok = comp_ok && cr.verdict == Verdict::Converged;
  if (!comp_ok) ok = false;

  record(5, ok,
         detail + fmt("R osc %.2e  |R-L-tau| %.2e  s %.6f  compressed %s", worst_osc,
                      worst_id, squeezed.s, verdict_name(cr.verdict)));
}

void criterion_6_scaling() {
  GridSpec g = grid1(64);
  KahlerMetricField bg = flat_metric(g);
  ProblemSetup setup =
      make_coupled_setup(bg, add(scaled(bg.g, 0.5), complex_hessian(cosx(g, 0.3))));
  SolverConfig cfg;
  ContinuityState st = solve_coupled(0.4, setup, make_field(g), make_field(g), cfg);

  auto [tsetup, tstate] = scaling_transform(setup, st, 2.0);
  bool lambda_exact = tsetup.classes.lambda == 2.0 * setup.classes.lambda;

  ContinuityState re = solve_coupled(0.2, tsetup, tstate.phi, tstate.f, cfg);
  double dphi = sup_norm(sub(re.phi, tstate.phi));
  double df = sup_norm(sub(re.f, tstate.f));
  double dalpha = sup_abs(sub(re.alpha, tstate.alpha));
  bool ok = lambda_exact && dphi <= 1e-9 && df <= 1e-9 && dalpha <= 1e-9;
  record(6, ok,
         fmt("lambda %s  dphi %.2e  df %.2e  dalpha %.2e", lambda_exact ? "exact" : "OFF",
             dphi, df, dalpha));
}

void criterion_7_conservation() {
  double worst = 0.0;
  bool ok = !shared.conservation.empty();
  for (const ClassConservationReport& rep : shared.conservation) {
    worst = std::max({worst, rep.omega_drift, rep.alpha_drift});
    if (rep.flagged || rep.omega_drift > 1e-10 || rep.alpha_drift > 1e-10) ok = false;
  }
  record(7, ok, fmt("%zu ladders, worst relative drift %.3e", shared.conservation.size(),
                    worst));
}

void criterion_8_oracles() {
  // Dense second-order stencil vs the spectral Laplacian, h^2 refinement.
  auto probe = [](const GridSpec& g) {
    return evaluate_trig(g, {wv({1, 0}, 1.0, -0.5 * kPi), wv({0, 1}, 0.3, 0.0)});
  };
  auto fd_err = [&](const KahlerMetricField& m) {
    oracle::DenseOperator op = oracle::fd_laplacian_oracle(m);
    ScalarField p = probe(m.grid());
    return sup_norm(sub(op.apply(p), laplacian(m, p)));
  };
  auto curved = [](const GridSpec& g) {
    return make_metric(
        add(flat_metric(g).g, complex_hessian(evaluate_trig(g, {wv({1, 1}, 0.15, 0.4)}))));
  };
  double rf = fd_err(flat_metric(grid1(16))) / fd_err(flat_metric(grid1(32)));
  double rc = fd_err(curved(grid1(16))) / fd_err(curved(grid1(32)));
  bool fd_ok = rf >= 3.5 && rf <= 4.5 && rc >= 3.5 && rc <= 4.5;

  GridSpec g = grid1(64);
  KahlerMetricField bg = flat_metric(g);
  ProblemSetup jsetup = make_coupled_setup(bg, scaled(bg.g, 0.5));
  double jerr = oracle::jacobian_fd_check(0.7, jsetup, cosx(g, 0.05), sinx(g, 0.04),
                                          probe(g));
  bool jac_ok = jerr <= 1e-6;

  // Two independent routes to the form Laplacian on a random smooth closed
  // form against a curved metric.
  KahlerMetricField m = curved(g);
  HermitianFormField form =
      add(scaled(bg.g, 0.7), complex_hessian(random_trig(g, 31, 3, 0.3)));
  HermitianFormField via_trace = form_laplacian_closed(m, form);
  HermitianFormField via_hodge = hodge_laplacian_surface_oracle(m, form);
  double dual = sup_abs(sub(via_trace, via_hodge));
  bool dual_ok = dual <= 1e-8 * (1.0 + sup_abs(via_trace));

  ScalarField phi_star = evaluate_trig(g, {wv({1, 0}, 0.03, 0.0), wv({1, 1}, 0.01, 0.4)});
  ScalarField f_star = evaluate_trig(g, {wv({0, 1}, 0.02, -0.7)});
  oracle::ManufacturedCoupled mc = oracle::manufacture_coupled(bg, phi_star, f_star, 2.0,
                                                               -0.8, 1.3);
  SolverConfig ccfg;
  ccfg.kappa = mc.kappa;
  ContinuityState sc = solve_coupled(mc.t, mc.setup, make_field(g), make_field(g), ccfg);
  double ec = std::max(sup_norm(sub(sc.phi, mc.phi_star)), sup_norm(sub(sc.f, mc.f_star)));

  oracle::ManufacturedCoupled mk = oracle::manufacture_ke(bg, phi_star, 1.0);
  ContinuityState sk = solve_ke(mk.t, mk.setup, make_field(g), SolverConfig{});
  double ek = sup_norm(sub(sk.phi, mk.phi_star));

  oracle::ManufacturedConformal mf =
      oracle::manufacture_conformal(bg, cosx(g, 0.08), sinx(g, 0.05), 1.5, -1.0, 0.8);
  SolverConfig fcfg;
  fcfg.kappa = mf.kappa;
  ContinuityState sf = solve_conformal(mf.t, mf.setup, make_field(g), make_field(g), fcfg);
  double ef = std::max(sup_norm(sub(sf.phi, mf.u_star)), sup_norm(sub(sf.tau, mf.tau_star)));
  bool man_ok = ec <= 1e-8 && ek <= 1e-8 && ef <= 1e-8;

  record(8, fd_ok && jac_ok && dual_ok && man_ok,
         fmt("fd ratios %.2f/%.2f  jac %.2e  dual %.2e  manufactured %.2e/%.2e/%.2e", rf,
             rc, jerr, dual, ec, ek, ef));
}

void criterion_9_refinement() {
  if (!shared.run128_ok) {
    record(9, false, "skipped: reference run did not converge");
    return;
  }
  GridSpec g64 = grid1(64);
  ProblemSetup setup = reference_setup(g64, false);
  LadderResult r = run_ladder(setup, reference_schedule(), SolverConfig{});
  if (r.verdict != Verdict::Converged) {
    record(9, false, fmt("64-point run %s", verdict_name(r.verdict)));
    return;
  }
  const ScalarField& coarse = r.states.back().phi;
  const ScalarField& fine = shared.run128.states.back().phi;
  double worst = 0.0;
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j) {
      cplx c = coarse.values[std::size_t(i) * 64 + j];
      cplx f = fine.values[std::size_t(2 * i) * 128 + 2 * j];
      worst = std::max(worst, std::abs(c - f));
    }
  record(9, worst <= 1e-8, fmt("phi difference on shared nodes %.3e", worst));
}

void criterion_10_two_dimensional() {
  auto t0 = std::chrono::steady_clock::now();
  GridSpec g;
  g.n = 2;
  g.points_per_axis = 16;
  KahlerMetricField bg = flat_metric(g);
  ScalarField phi_star =
      evaluate_trig(g, {wv({1, 0, 0, 0}, 0.02, 0.0), wv({0, 0, 1, 0}, 0.01, 0.4)});
  ScalarField f_star = evaluate_trig(g, {wv({0, 1, 0, 0}, 0.015, -0.2)});

  oracle::ManufacturedCoupled fix =
      oracle::manufacture_coupled(bg, phi_star, f_star, 1.0, -0.8, 1.0);
  ContinuityState st =
      solve_coupled(fix.t, fix.setup, make_field(g), make_field(g), SolverConfig{});
  double err =
      std::max(sup_norm(sub(st.phi, fix.phi_star)), sup_norm(sub(st.f, fix.f_star)));

  MonitorReport pot = check_potential_bounds(st, fix.setup, 1.0);
  bool monitors_ok = pot.all_passed();

  // Conserved class integrals along a short ladder of the same problem.
  LadderSchedule sch;
  sch.t0 = 0.5;
  sch.ratio = 2.0;
  sch.t_max = 2.0;
  LadderResult r = run_ladder(fix.setup, sch, SolverConfig{});
  bool cons_ok = r.verdict != Verdict::Failed && !r.conservation.flagged &&
                 r.conservation.omega_drift <= 1e-10 && r.conservation.alpha_drift <= 1e-10;
  for (const ContinuityState& s : r.states)
    if (!check_potential_bounds(s, fix.setup, 1.0).all_passed()) monitors_ok = false;

  double elapsed = seconds_since(t0);
  record(10, err <= 1e-6 && monitors_ok && cons_ok && elapsed <= 600.0,
         fmt("recovery %.3e  monitors %s  drift %.2e/%.2e  %.0fs", err,
             monitors_ok ? "pass" : "FAIL", r.conservation.omega_drift,
             r.conservation.alpha_drift, elapsed));
}

}  // namespace

int main() {
  struct Step {
    int id;
    void (*fn)();
  };
  const Step steps[] = {
      {1, criterion_1_torus_convergence}, {2, criterion_2_potential_margins},
      {3, criterion_3_scalar_floor},      {4, criterion_4_ricci_flat_mode},
      {5, criterion_5_conformal_suite},   {6, criterion_6_scaling},
      {7, criterion_7_conservation},      {8, criterion_8_oracles},
      {9, criterion_9_refinement},        {10, criterion_10_two_dimensional},
  };
  for (const Step& s : steps) {
    try {
      s.fn();
    } catch (const std::exception& e) {
      record(s.id, false, std::string("exception: ") + e.what());
    }
  }
  std::printf("acceptance: %d/10 criteria passed\n", 10 - g_failures);
  return g_failures;
}
