#include <cmath>

#include "contlab/errors.hpp"
#include "contlab/kahler.hpp"
#include "contlab/oracle.hpp"
#include "contlab/spectral.hpp"
#include "contlab/system.hpp"
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

TrigTerm wave(int kx, int ky, double amp, double phase = 0.0) {
  TrigTerm t;
  t.wave[0] = kx;
  t.wave[1] = ky;
  t.amplitude = amp;
  t.phase = phase;
  return t;
}

ScalarField smooth_test_field(const GridSpec& g) {
  return evaluate_trig(g, {wave(1, 0, 1.0, -0.5 * kPi), wave(0, 1, 0.3, 0.0)});
}

KahlerMetricField curved_metric(const GridSpec& g) {
  return make_metric(
      add(flat_metric(g).g, complex_hessian(evaluate_trig(g, {wave(1, 1, 0.15, 0.4)}))));
}

double fd_error(const KahlerMetricField& m, const ScalarField& h) {
  oracle::DenseOperator op = oracle::fd_laplacian_oracle(m);
  ScalarField coarse = op.apply(h);
  ScalarField exact = laplacian(m, h);
  return sup_norm(sub(coarse, exact));
}

}  // namespace

TEST_CASE("dense laplacian stencil refines at second order") {
  for (bool curved : {false, true}) {
    GridSpec gc = grid1(16);
    GridSpec gf = grid1(32);
    KahlerMetricField mc = curved ? curved_metric(gc) : flat_metric(gc);
    KahlerMetricField mf = curved ? curved_metric(gf) : flat_metric(gf);
    double ec = fd_error(mc, smooth_test_field(gc));
    double ef = fd_error(mf, smooth_test_field(gf));
    REQUIRE(ef > 0.0);
    double ratio = ec / ef;
    CAPTURE(curved);
    CAPTURE(ratio);
    CHECK(ratio >= 3.5);
    CHECK(ratio <= 4.5);
  }
}

TEST_CASE("dense laplacian shape, symmetry, and kernel") {
  GridSpec g = grid1(16);
  oracle::DenseOperator op = oracle::fd_laplacian_oracle(flat_metric(g));
  CHECK(op.tag == oracle::OperatorTag::FdLaplacian);
  CHECK(op.size == g.total_nodes());
  CHECK(op.grid.points_per_axis == 16);
  // Constant-coefficient stencil on a torus is exactly symmetric and
  // annihilates constants without roundoff.
  CHECK(op.symmetry_defect() == 0.0);
  CHECK(sup_norm(op.apply(constant_field(g, 3.25))) == 0.0);

  // at() addresses row-major storage.
  CHECK(op.at(0, 0) == op.a[0]);
  CHECK(op.at(1, 0) == op.a[op.size]);
}

TEST_CASE("dense oracle refuses grids past its caps") {
  CHECK_THROWS_AS(oracle::fd_laplacian_oracle(flat_metric(grid1(64))), GridTooLarge);
  GridSpec g2;
  g2.n = 2;
  g2.points_per_axis = 16;
  CHECK_THROWS_AS(oracle::fd_laplacian_oracle(flat_metric(g2)), GridTooLarge);
}

TEST_CASE("analytic linearization of the first residual matches difference quotients") {
  GridSpec g = grid1(64);
  KahlerMetricField bg = flat_metric(g);
  ScalarField gentle = evaluate_trig(g, {wave(1, 0, 1.0, -0.5 * kPi), wave(0, 1, 0.3, 0.0)});

  ProblemSetup flat = make_ke_setup(bg);
  double e_flat = oracle::jacobian_fd_check(1.0, flat, make_field(g), make_field(g), gentle);
  CHECK(e_flat <= 1e-6);

  // Generic base point: curved background, nonzero potentials.
  ProblemSetup setup = make_coupled_setup(bg, add(scaled(bg.g, 0.5),
                                                  complex_hessian(evaluate_trig(g, {wave(1, 0, 0.1, 0.0)}))));
  ScalarField phi = evaluate_trig(g, {wave(1, 0, 0.05, 0.3)});
  ScalarField f = evaluate_trig(g, {wave(0, 1, 0.04, -0.2)});
  double e_generic = oracle::jacobian_fd_check(0.7, setup, phi, f, gentle);
  CHECK(e_generic <= 1e-6);
}

TEST_CASE("manufactured coupled fixture is recovered to solver accuracy") {
  GridSpec g = grid1(64);
  KahlerMetricField bg = flat_metric(g);
  ScalarField phi_star = evaluate_trig(g, {wave(1, 0, 0.03, 0.0), wave(1, 1, 0.01, 0.4)});
  ScalarField f_star = evaluate_trig(g, {wave(0, 1, 0.02, -0.7)});

  oracle::ManufacturedCoupled fix =
      oracle::manufacture_coupled(bg, phi_star, f_star, 2.0, -0.8, 1.3);
  SolverConfig cfg;
  cfg.kappa = fix.kappa;
  ContinuityState st = solve_coupled(fix.t, fix.setup, make_field(g), make_field(g), cfg);
  CHECK(sup_norm(sub(st.phi, fix.phi_star)) <= 1e-8);
  CHECK(sup_norm(sub(st.f, fix.f_star)) <= 1e-8);
}

TEST_CASE("manufactured single-equation fixtures recover across t, including twisted") {
  GridSpec g = grid1(64);
  KahlerMetricField bg = flat_metric(g);
  ScalarField phi_star = evaluate_trig(g, {wave(1, 0, 0.05, 0.0), wave(0, 1, 0.02, 1.1)});
  SolverConfig cfg;

  for (double t : {0.5, 5.0}) {
    oracle::ManufacturedCoupled fix = oracle::manufacture_ke(bg, phi_star, t);
    CHECK(fix.setup.classes.lambda == 0.0);
    CHECK(sup_abs(fix.setup.alpha_hat) == 0.0);
    ContinuityState st = solve_ke(fix.t, fix.setup, make_field(g), cfg);
    CHECK(sup_norm(sub(st.phi, fix.phi_star)) <= 1e-8);
  }
  for (double t : {0.1, 10.0}) {
    oracle::ManufacturedCoupled fix = oracle::manufacture_ke(bg, phi_star, t, -0.7);
    ContinuityState st = solve_ke(fix.t, fix.setup, make_field(g), cfg);
    CHECK(sup_norm(sub(st.phi, fix.phi_star)) <= 1e-8);
  }
}

TEST_CASE("manufactured surface fixture is recovered to solver accuracy") {
  GridSpec g = grid1(64);
  KahlerMetricField bg = flat_metric(g);
  ScalarField u_star = evaluate_trig(g, {wave(1, 0, 0.08, 0.0)});
  ScalarField tau_star = evaluate_trig(g, {wave(1, 0, 0.05, -0.5 * kPi)});

  oracle::ManufacturedConformal fix =
      oracle::manufacture_conformal(bg, u_star, tau_star, 1.5, -1.0, 0.8);
  SolverConfig cfg;
  cfg.kappa = fix.kappa;
  ContinuityState st = solve_conformal(fix.t, fix.setup, make_field(g), make_field(g), cfg);
  CHECK(sup_norm(sub(st.phi, fix.u_star)) <= 1e-8);
  CHECK(sup_norm(sub(st.tau, fix.tau_star)) <= 1e-8);
}

TEST_CASE("zero targets degenerate to the background fixture") {
  GridSpec g = grid1(32);
  KahlerMetricField bg = flat_metric(g);
  ScalarField zero = make_field(g);
  oracle::ManufacturedCoupled fix = oracle::manufacture_coupled(bg, zero, zero, 1.0);
  CHECK(sup_norm(fix.setup.fhat) <= 1e-12);
  ContinuityState st = solve_coupled(1.0, fix.setup, zero, zero, SolverConfig{});
  CHECK(sup_norm(st.phi) <= 1e-10);
  CHECK(sup_norm(st.f) <= 1e-10);
}
