#include <cmath>

#include "contlab/classes.hpp"
#include "contlab/errors.hpp"
#include "contlab/spectral.hpp"
#include "contlab/trig.hpp"
#include "doctest.h"

using namespace contlab;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTorusArea = 4.0 * kPi * kPi;

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

}  // namespace

TEST_CASE("flat torus class constants with a scaled-plus-exact companion") {
  GridSpec g = grid1(32);
  KahlerMetricField bg = flat_metric(g);
  ScalarField psi = evaluate_trig(g, {wave1(1, 0, 0.3, 0.0)});
  HermitianFormField alpha = add(scaled(bg.g, 0.5), complex_hessian(psi));

  ClassData cd = compute_class_data(bg, alpha, BackgroundMode::KahlerTorus);
  CHECK(cd.volume == doctest::Approx(kTorusArea).epsilon(1e-13));
  CHECK(std::abs(cd.r_bar) <= 1e-12);
  // The exact (hessian) part integrates away: only the scaled part counts.
  CHECK(cd.tau_bar == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(cd.lambda == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(cd.mode == BackgroundMode::KahlerTorus);
}

TEST_CASE("curved torus metrics keep zero average scalar curvature") {
  GridSpec g = grid1(32);
  KahlerMetricField m = make_metric(
      add(flat_metric(g).g, complex_hessian(evaluate_trig(g, {wave1(1, 0, 0.25, 0.4)}))));
  ClassData cd = compute_class_data(m, scaled(m.g, 0.3), BackgroundMode::KahlerTorus);
  CHECK(std::abs(cd.r_bar) <= 1e-11);
  CHECK(cd.tau_bar == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(cd.lambda == doctest::Approx(-0.3).epsilon(1e-11));
}

TEST_CASE("synthetic surface class data averages the prescribed fields") {
  GridSpec g = grid1(64);
  KahlerMetricField bg = flat_metric(g);
  ScalarField rhat = shifted(evaluate_trig(g, {wave1(1, 0, 0.3, 0.0)}), -1.0);
  ScalarField tauhat = evaluate_trig(g, {wave1(1, 0, 0.1, -0.5 * kPi)});
  ClassData cd = compute_class_data_conformal(bg, rhat, tauhat);
  CHECK(cd.r_bar == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(std::abs(cd.tau_bar) <= 1e-13);
  CHECK(cd.lambda == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(cd.mode == BackgroundMode::ConformalSynthetic);
}

TEST_CASE("ricci potential reproduces its defining form, mean free") {
  GridSpec g = grid1(32);
  KahlerMetricField bg = flat_metric(g);
  ScalarField psi = evaluate_trig(g, {wave1(1, 0, 0.3, 0.2)});
  HermitianFormField alpha = add(scaled(bg.g, 0.5), complex_hessian(psi));

  ScalarField fhat = ricci_potential(bg, alpha, -0.5);
  HermitianFormField target =
      add(add(scaled(ricci(bg), -1.0), scaled(bg.g, -0.5)), alpha);
  CHECK(sup_abs(sub(complex_hessian(fhat), target)) <= 1e-11);
  CHECK(std::abs(volume_integral(bg, fhat)) <= 1e-11);
  // On the flat background the defining form collapses to hess(psi).
  CHECK(sup_norm(sub(fhat, psi)) <= 1e-11);

  // lambda that contradicts the averaged trace is refused.
  CHECK_THROWS_AS(ricci_potential(bg, alpha, 0.0), CompatibilityFailure);
}

TEST_CASE("class integrals match direct quadrature") {
  GridSpec g = grid1(32);
  KahlerMetricField bg = flat_metric(g);
  KahlerMetricField m = make_metric(
      add(bg.g, complex_hessian(evaluate_trig(g, {wave1(1, 0, 0.2, 0.0)}))));
  ScalarField psi = evaluate_trig(g, {wave1(0, 1, 0.3, 0.5)});
  HermitianFormField alpha = add(scaled(bg.g, 0.5), complex_hessian(psi));

  ClassConservationEntry e = class_integrals(bg, m, alpha);
  CHECK(e.omega_integral == doctest::Approx(volume(m)).epsilon(1e-14));
  // The exact part pairs to zero against the flat background.
  CHECK(e.alpha_integral == doctest::Approx(0.5 * kTorusArea).epsilon(1e-12));
  CHECK(e.alpha_scale >= std::abs(e.alpha_integral));
}

TEST_CASE("conservation summary flags relative drift above 1e-10") {
  ClassConservationEntry base{39.5, 19.7, 19.7};
  ClassConservationReport clean = summarize_class_conservation({base, base, base});
  CHECK(clean.omega_drift == 0.0);
  CHECK(clean.alpha_drift == 0.0);
  CHECK_FALSE(clean.flagged);

  ClassConservationEntry drifted = base;
  drifted.omega_integral *= 1.0 + 1e-8;
  ClassConservationReport dirty = summarize_class_conservation({base, base, drifted});
  CHECK(dirty.omega_drift == doctest::Approx(1e-8).epsilon(1e-3));
  CHECK(dirty.flagged);

  // A conserved value that is exactly 0 is judged against the L1 scale.
  ClassConservationEntry z0{39.5, 0.0, 5.0};
  ClassConservationEntry z1{39.5, 1e-12, 5.0};
  ClassConservationReport zero_case = summarize_class_conservation({z0, z1});
  CHECK(zero_case.alpha_drift <= 1e-12);
  CHECK_FALSE(zero_case.flagged);
}
