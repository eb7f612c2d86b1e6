#include <cmath>

#include "contlab/continuation.hpp"
#include "contlab/errors.hpp"
#include "contlab/kahler.hpp"
#include "contlab/monitors.hpp"
#include "contlab/spectral.hpp"
#include "contlab/trig.hpp"
#include "doctest.h"

using namespace contlab;

namespace {

constexpr double kPi = 3.14159265358979323846;

GridSpec grid1(int points) {
  GridSpec g;
  g.n = 1;
  g.points_per_axis = points;
  return g;
}

TrigTerm wave1(int kx, int ky, double amp, double phase) {
  TrigTerm t;
  t.wave[0] = kx;
  t.wave[1] = ky;
  t.amplitude = amp;
  t.phase = phase;
  return t;
}

ScalarField cosx(const GridSpec& g, double amp) {
  return evaluate_trig(g, {wave1(1, 0, amp, 0.0)});
}

ScalarField sinx(const GridSpec& g, double amp) {
  return evaluate_trig(g, {wave1(1, 0, amp, -0.5 * kPi)});
}

const CheckResult& get(const MonitorReport& rep, const char* name) {
  const CheckResult* c = rep.find(name);
  REQUIRE(c != nullptr);
  return *c;
}

}  // namespace

TEST_CASE("outcome names and report plumbing") {
  CHECK(std::string(outcome_name(CheckOutcome::Pass)) == "pass");
  CHECK(std::string(outcome_name(CheckOutcome::Fail)) == "fail");
  CHECK(std::string(outcome_name(CheckOutcome::NotApplicable)) == "n/a");

  MonitorReport rep;
  CheckResult na;
  na.name = "x";
  na.outcome = CheckOutcome::NotApplicable;
  rep.checks.push_back(na);
  CHECK(rep.all_passed());  // n/a never fails a report
  CHECK(rep.find("y") == nullptr);
}

TEST_CASE("potential bound arithmetic instance at t = 1, lambda = -1") {
  GridSpec g = grid1(32);
  KahlerMetricField bg = flat_metric(g);
  ProblemSetup setup =
      make_coupled_setup_prescribed(bg, zero_form(g), cosx(g, 0.3), -1.0);

  ContinuityState st;
  st.mode = SystemMode::Coupled;
  st.t = 1.0;
  st.f = cosx(g, 0.2);
  st.omega = bg;

  // (1/t - lambda) = 2: a potential of sup 0.25 sits exactly on the bound
  // sup f + sup fhat = 0.5.
  st.phi = cosx(g, 0.24);
  MonitorReport pass_rep = check_potential_bounds(st, setup, 1.0);
  const CheckResult& ok = get(pass_rep, "potential-phi");
  CHECK(ok.outcome == CheckOutcome::Pass);
  CHECK(ok.bound == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(ok.margin == doctest::Approx(0.02).epsilon(1e-10));

  st.phi = cosx(g, 0.26);
  const CheckResult& bad = get(check_potential_bounds(st, setup, 1.0), "potential-phi");
  CHECK(bad.outcome == CheckOutcome::Fail);
  CHECK(bad.margin == doctest::Approx(-0.02).epsilon(1e-10));

  // Zero state: 0 <= sup fhat trivially.
  st.phi = make_field(g);
  st.f = make_field(g);
  CHECK(get(check_potential_bounds(st, setup, 1.0), "potential-phi").outcome ==
        CheckOutcome::Pass);
}

TEST_CASE("scalar lower bound applicability gates") {
  GridSpec g = grid1(32);
  KahlerMetricField bg = flat_metric(g);
  SolverConfig cfg;
  ScalarField zero = make_field(g);

  // Derived source, companion >= 0: in scope and satisfied.
  ProblemSetup good = make_coupled_setup(bg, scaled(bg.g, 0.5));
  ContinuityState st = solve_coupled(1.0, good, zero, zero, cfg);
  MonitorReport rep = check_scalar_lower_bound(st, good);
  CHECK(get(rep, "trace-lower").outcome == CheckOutcome::Pass);
  CHECK(get(rep, "scalar-lower").outcome == CheckOutcome::Pass);
  // Stored floor for the scalar check is n (lambda - 1/t), negated by the
  // lower-bound convention.
  CHECK(get(rep, "scalar-lower").bound ==
        doctest::Approx(-(good.classes.lambda - 1.0)).epsilon(1e-13));

  // Sign-indefinite companion: out of scope.
  HermitianFormField indefinite = complex_hessian(sinx(g, 0.3));
  ProblemSetup mixed = make_coupled_setup(bg, indefinite);
  ContinuityState st2 = solve_coupled(1.0, mixed, zero, zero, cfg);
  CHECK(get(check_scalar_lower_bound(st2, mixed), "trace-lower").outcome ==
        CheckOutcome::NotApplicable);

  // Prescribed source: out of scope even with a nonnegative companion.
  ProblemSetup prescribed =
      make_ke_setup_prescribed(bg, random_trig(g, 5, 3, 0.2), 0.0);
  ContinuityState st3 = solve_ke(1.0, prescribed, zero, cfg);
  CHECK(get(check_scalar_lower_bound(st3, prescribed), "scalar-lower").outcome ==
        CheckOutcome::NotApplicable);
}

TEST_CASE("conformal bounds carry the proof constants for the reference fixture") {
  GridSpec g = grid1(64);
  KahlerMetricField bg = flat_metric(g);
  ScalarField rhat = shifted(cosx(g, 0.3), -1.0);  // max -0.7, min -1.3
  ScalarField tauhat = sinx(g, 0.1);
  ProblemSetup setup = make_conformal_setup(bg, rhat, tauhat);
  CHECK(setup.classes.lambda == doctest::Approx(-1.0).epsilon(1e-13));

  SolverConfig cfg;
  ContinuityState st = solve_conformal(1.0, setup, make_field(g), make_field(g), cfg);
  MonitorReport rep = check_conformal_bounds(st, setup);

  // denom = rhat_max - tauhat_min = -0.6; lower-style entries store the
  // negated floor.
  CHECK(get(rep, "conformal-einv-upper").bound == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
  CHECK(get(rep, "conformal-trace-lower").bound ==
        doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(get(rep, "conformal-trace-upper").bound ==
        doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(get(rep, "conformal-einv-lower").bound ==
        doctest::Approx(-25.0 / 39.0).epsilon(1e-12));
  CHECK(get(rep, "conformal-scalar").bound == doctest::Approx(7.0 / 3.0).epsilon(1e-12));
  CHECK(rep.all_passed());
  for (const auto& c : rep.checks) CHECK(c.outcome == CheckOutcome::Pass);
}

TEST_CASE("degenerate conformal data pins the conformal factor to one") {
  GridSpec g = grid1(32);
  ProblemSetup setup =
      make_conformal_setup(flat_metric(g), constant_field(g, -1.0), make_field(g));
  SolverConfig cfg;
  ContinuityState st = solve_conformal(1.0, setup, make_field(g), make_field(g), cfg);
  MonitorReport rep = check_conformal_bounds(st, setup);
  // Upper and lower window collapse: e^{-u} <= 1 and >= 1.
  CHECK(get(rep, "conformal-einv-upper").bound == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(get(rep, "conformal-einv-lower").bound == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(rep.all_passed());
}

TEST_CASE("conformal bounds go not-applicable when the oscillation hypothesis fails") {
  GridSpec g = grid1(32);
  ProblemSetup setup = make_conformal_setup(flat_metric(g),
                                            shifted(cosx(g, 0.3), -1.0), sinx(g, 0.5));
  ContinuityState st;
  st.mode = SystemMode::Conformal;
  st.t = 1.0;
  st.phi = make_field(g);
  st.tau = make_field(g);
  st.scalar_curv = make_field(g);
  MonitorReport rep = check_conformal_bounds(st, setup);
  for (const auto& c : rep.checks) CHECK(c.outcome == CheckOutcome::NotApplicable);
  CHECK(rep.all_passed());
}

TEST_CASE("equivalence growth and plateau on synthetic rung histories") {
  auto mk = [](int index, double c) {
    RungRecord r;
    r.index = index;
    r.t = 0.1 * std::pow(2.0, index);
    r.equivalence_c = c;
    return r;
  };
  std::vector<RungRecord> flat;
  for (int k = 0; k < 10; ++k) flat.push_back(mk(k, 1.2));
  MonitorReport ok = check_equivalence_growth(flat);
  CHECK(ok.all_passed());
  CHECK(get(ok, "equivalence-growth").outcome == CheckOutcome::Pass);
  CHECK(get(ok, "equivalence-plateau").observed == doctest::Approx(0.0));

  std::vector<RungRecord> jump = flat;
  jump[7].equivalence_c = 2.0;  // ratio 5/3 > 3/2 past the settle-in window
  CHECK(get(check_equivalence_growth(jump), "equivalence-growth").outcome ==
        CheckOutcome::Fail);

  std::vector<RungRecord> tiny = {mk(0, 1.0)};
  MonitorReport na = check_equivalence_growth(tiny);
  CHECK(get(na, "equivalence-growth").outcome == CheckOutcome::NotApplicable);
  CHECK(get(na, "equivalence-plateau").outcome == CheckOutcome::NotApplicable);
}

TEST_CASE("linear potential growth holds exactly in the flat source-free regime") {
  GridSpec g = grid1(32);
  KahlerMetricField bg = flat_metric(g);
  ProblemSetup setup = make_ke_setup_prescribed(bg, random_trig(g, 5, 3, 0.05), 0.0);
  LadderSchedule sch;
  sch.t0 = 0.1;
  sch.ratio = 2.0;
  sch.t_max = 50.0;
  LadderResult r = run_ladder(setup, sch, SolverConfig{});
  REQUIRE(r.states.size() >= 6);

  MonitorReport rep = check_ct_bound(r.states, setup);
  CHECK(get(rep, "ct-linearity").outcome == CheckOutcome::Pass);
  const CheckResult& cc = get(rep, "ct-constant");
  CHECK(cc.outcome == CheckOutcome::Pass);
  CHECK(cc.bound == doctest::Approx(sup_norm(setup.fhat) + 1e-8).epsilon(1e-12));

  // Corrupting the final state breaks linearity.
  std::vector<ContinuityState> corrupted = r.states;
  corrupted.back().phi = scaled(corrupted.back().phi, 10.0);
  CHECK(get(check_ct_bound(corrupted, setup), "ct-linearity").outcome ==
        CheckOutcome::Fail);

  // Nonzero lambda setups are out of scope.
  ProblemSetup coupled = make_coupled_setup(bg, scaled(bg.g, 0.5));
  CHECK(get(check_ct_bound(r.states, coupled), "ct-linearity").outcome ==
        CheckOutcome::NotApplicable);
}

TEST_CASE("source compression keeps the mean and lands below the documented factor") {
  GridSpec g = grid1(64);
  KahlerMetricField bg = flat_metric(g);
  ScalarField rhat = constant_field(g, -0.7);

  // Strict hypothesis already true: untouched.
  CompressionResult idle = check_a1_and_compress(sinx(g, 0.1), rhat, bg);
  CHECK_FALSE(idle.compressed);
  CHECK(idle.s == 1.0);
  CHECK(sup_norm(sub(idle.tauhat, sinx(g, 0.1))) == 0.0);

  // Oscillation +-2 against rhat_max = -0.7: factor lands just under 0.175.
  CompressionResult squeezed = check_a1_and_compress(sinx(g, 2.0), rhat, bg);
  CHECK(squeezed.compressed);
  CHECK(squeezed.s <= 0.175);
  CHECK(squeezed.s > 0.1749);
  CHECK(std::abs(volume_mean(bg, squeezed.tauhat)) <= 1e-13);
  CHECK(sup_norm(squeezed.tauhat) < 0.35);

  // Average outside the admissible window: refused outright.
  CHECK_THROWS_AS(check_a1_and_compress(constant_field(g, -0.9), rhat, bg), A1Violated);
  // Average admissible but outside the compressed half-window: also refused.
  CHECK_THROWS_AS(check_a1_and_compress(shifted(sinx(g, 2.0), 0.4), rhat, bg), A1Violated);
}
