#include "contlab/system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "contlab/errors.hpp"
#include "contlab/kahler.hpp"
#include "contlab/krylov.hpp"
#include "contlab/spectral.hpp"

namespace contlab {

void SolverConfig::validate() const {
  if (!(kappa > 0.0)) throw Error("solver config: kappa must be positive");
  if (!(newton_tol > 0.0) || !(outer_tol > 0.0) || !(krylov_tol > 0.0))
    throw Error("solver config: tolerances must be positive");
  if (max_newton < 1 || max_outer < 1 || krylov_max < 1)
    throw Error("solver config: iteration budgets must be positive");
  if (!(min_step > 0.0) || !(min_step < 1.0))
    throw Error("solver config: damping floor must lie in (0, 1)");
}

namespace {

void emit(const TelemetrySink& sink, const char* phase, int iteration, double residual) {
  if (!sink) return;
  TelemetryRecord rec;
  rec.phase = phase;
  rec.iteration = iteration;
  rec.residual = residual;
  sink(rec);
}

void require_lambda_regime(double lambda) {
  if (lambda > 1e-12)
    throw Error("positive lambda regime rejected (lambda = " + std::to_string(lambda) + ")");
}

HermitianFormField combined_background_form(const KahlerMetricField& background,
                                            const HermitianFormField& alpha_hat, double lambda) {
  return add(add(scaled(ricci(background), -1.0), scaled(background.g, lambda)), alpha_hat);
}

// r1 with the metric already built for the candidate potential.
ScalarField residual_phi_at(double t, const ProblemSetup& setup, const ScalarField& phi,
                            const ScalarField& f, const KahlerMetricField& omega) {
  const double lambda = setup.classes.lambda;
  ScalarField r = scaled(phi, 1.0 / t - lambda);
  r = sub(r, sub(log_det(omega), log_det(setup.background)));
  r = sub(r, f);
  r = sub(r, setup.fhat);
  return r;
}

ScalarField residual_f_at(double t, const ProblemSetup& setup, const KahlerMetricField& omega,
                          const ScalarField& f, double kappa) {
  ScalarField r = scaled(f, 1.0 / t);
  r = sub(r, scaled(add(laplacian(omega, f), trace(omega, setup.alpha_hat)), kappa));
  return r;
}

// Damped Newton iteration on the potential equation with the companion field
// frozen. Maintains phi, omega, r1 in lockstep.
void newton_phi(double t, const ProblemSetup& setup, const SolverConfig& config, double tol,
                ScalarField& phi, const ScalarField& f, KahlerMetricField& omega, ScalarField& r1,
                SolveStats& stats, const TelemetrySink& sink) {
  const double c0 = 1.0 / t - setup.classes.lambda;
  double sup = sup_norm(r1);
  int iters = 0;
  while (sup > tol) {
    if (iters >= config.max_newton)
      throw NoConvergence("newton iteration budget exhausted", sup, iters);
    ++iters;
    ++stats.newton_iterations;

    std::vector<cplx> avg = averaged_inverse(omega);
    LinearOp apply = [&](const std::vector<double>& x) {
      ScalarField xf = from_vector(setup.grid, x);
      return to_vector(sub(scaled(xf, c0), laplacian(omega, xf)));
    };
    LinearOp precond = [&](const std::vector<double>& r) {
      return to_vector(solve_constant_helmholtz(from_vector(setup.grid, r), avg, c0, 1.0));
    };
    std::vector<double> delta(setup.grid.total_nodes(), 0.0);
    KrylovResult kr =
        bicgstab(apply, precond, to_vector(scaled(r1, -1.0)), delta, config.krylov_tol,
                 config.krylov_max);
    stats.krylov_iterations += kr.iterations;
    if (!kr.converged)
      throw NoConvergence("newton linear solve stalled", kr.relative_residual, kr.iterations);

    ScalarField dphi = from_vector(setup.grid, delta);
    double step = 1.0;
    bool accepted = false;
    bool entered_cone = false;
    while (step >= config.min_step) {
      ScalarField cand = add(phi, scaled(dphi, step));
      KahlerMetricField omega_cand;
      if (!try_metric_from_potential(setup.background, cand, omega_cand)) {
        step *= 0.5;
        ++stats.backtracks;
        continue;
      }
      entered_cone = true;
      ScalarField r1c = residual_phi_at(t, setup, cand, f, omega_cand);
      const double supc = sup_norm(r1c);
      if (supc < sup) {
        phi = std::move(cand);
        omega = std::move(omega_cand);
        r1 = std::move(r1c);
        sup = supc;
        accepted = true;
        break;
      }
      step *= 0.5;
      ++stats.backtracks;
    }
    if (!accepted) {
      if (!entered_cone)
        throw ConeExit("newton step leaves the cone even at the damping floor");
      throw NoConvergence("newton backtracking found no decrease", sup,
                          stats.newton_iterations);
    }
    emit(sink, "newton", stats.newton_iterations, sup);
  }
}

// Exact linear solve of the companion equation given the metric.
void solve_companion(double t, const ProblemSetup& setup, const SolverConfig& config,
                     const KahlerMetricField& omega, ScalarField& f, SolveStats& stats,
                     const TelemetrySink& sink) {
  const double c0 = 1.0 / t;
  ScalarField rhs = scaled(trace(omega, setup.alpha_hat), config.kappa);
  std::vector<cplx> avg = averaged_inverse(omega);
  LinearOp apply = [&](const std::vector<double>& x) {
    ScalarField xf = from_vector(setup.grid, x);
    return to_vector(sub(scaled(xf, c0), scaled(laplacian(omega, xf), config.kappa)));
  };
  LinearOp precond = [&](const std::vector<double>& r) {
    return to_vector(
        solve_constant_helmholtz(from_vector(setup.grid, r), avg, c0, config.kappa));
  };
  std::vector<double> x = to_vector(f);
  KrylovResult kr = bicgstab(apply, precond, to_vector(rhs), x, config.krylov_tol,
                             config.krylov_max);
  stats.krylov_iterations += kr.iterations;
  if (!kr.converged)
    throw NoConvergence("companion linear solve stalled", kr.relative_residual, kr.iterations);
  f = from_vector(setup.grid, x);
  emit(sink, "f-solve", kr.iterations, kr.relative_residual);
}

ContinuityState finish_coupled_state(SystemMode mode, double t, const ProblemSetup& setup,
                                     ScalarField phi, ScalarField f, KahlerMetricField omega,
                                     double joint, SolveStats stats) {
  ContinuityState state;
  state.mode = mode;
  state.t = t;
  state.alpha = add(setup.alpha_hat, complex_hessian(f));
  state.tau = trace(omega, state.alpha);
  state.scalar_curv = scalar_curvature(omega);
  state.phi = std::move(phi);
  state.f = std::move(f);
  state.omega = std::move(omega);
  state.residual_joint = joint;
  state.stats = stats;
  return state;
}

ScalarField exp_neg(const ScalarField& u) {
  return map_field(u, [](cplx v) { return std::exp(-v.real()); });
}

// Conformal mode works against a constant flat background with component
// ghat, so its Laplacian is the flat spectral one divided by ghat.
double conformal_background_component(const ProblemSetup& setup) {
  return setup.background.g.at(0, 0, 0).real();
}

}  // namespace

ProblemSetup make_coupled_setup(const KahlerMetricField& background,
                                const HermitianFormField& alpha_hat) {
  ProblemSetup setup;
  setup.mode = SystemMode::Coupled;
  setup.grid = background.grid();
  setup.background = background;
  setup.alpha_hat = alpha_hat;
  setup.classes = compute_class_data(background, alpha_hat, BackgroundMode::KahlerTorus);
  require_lambda_regime(setup.classes.lambda);
  setup.fhat = ricci_potential(background, alpha_hat, setup.classes.lambda);
  setup.defect = sub(complex_hessian(setup.fhat),
                     combined_background_form(background, alpha_hat, setup.classes.lambda));
  setup.rhat = make_field(setup.grid);
  setup.tauhat = make_field(setup.grid);
  return setup;
}

ProblemSetup make_coupled_setup_prescribed(const KahlerMetricField& background,
                                           const HermitianFormField& alpha_hat,
                                           const ScalarField& fhat, double lambda) {
  require_lambda_regime(lambda);
  require_same_grid(background.grid(), fhat.grid, "make_coupled_setup_prescribed");
  ProblemSetup setup;
  setup.mode = SystemMode::Coupled;
  setup.grid = background.grid();
  setup.background = background;
  setup.alpha_hat = alpha_hat;
  setup.classes = compute_class_data(background, alpha_hat, BackgroundMode::KahlerTorus);
  setup.classes.lambda = lambda;
  setup.fhat = fhat;
  setup.fhat_prescribed = true;
  setup.defect =
      sub(complex_hessian(fhat), combined_background_form(background, alpha_hat, lambda));
  setup.rhat = make_field(setup.grid);
  setup.tauhat = make_field(setup.grid);
  return setup;
}

ProblemSetup make_ke_setup(const KahlerMetricField& background) {
  ProblemSetup setup = make_coupled_setup(background, zero_form(background.grid()));
  setup.mode = SystemMode::KahlerEinstein;
  return setup;
}

ProblemSetup make_ke_setup_prescribed(const KahlerMetricField& background,
                                      const ScalarField& fhat, double lambda) {
  ProblemSetup setup = make_coupled_setup_prescribed(background, zero_form(background.grid()),
                                                     fhat, lambda);
  setup.mode = SystemMode::KahlerEinstein;
  return setup;
}

ProblemSetup make_conformal_setup(const KahlerMetricField& background, const ScalarField& rhat,
                                  const ScalarField& tauhat) {
  ProblemSetup setup;
  setup.mode = SystemMode::Conformal;
  setup.grid = background.grid();
  setup.background = background;
  const double ghat = background.g.at(0, 0, 0).real();
  for (std::size_t i = 0; i < setup.grid.total_nodes(); ++i)
    if (std::abs(background.g.at(i, 0, 0) - cplx(ghat, 0.0)) > 1e-13 * std::abs(ghat))
      throw Error("conformal mode needs a constant flat background");
  setup.classes = compute_class_data_conformal(background, rhat, tauhat);
  if (!(setup.classes.lambda < -1e-12))
    throw Error("conformal mode needs strictly negative lambda (got " +
                std::to_string(setup.classes.lambda) + ")");
  setup.alpha_hat = zero_form(setup.grid);
  setup.fhat = make_field(setup.grid);
  setup.defect = zero_form(setup.grid);
  setup.rhat = rhat;
  setup.tauhat = tauhat;
  return setup;
}

ScalarField coupled_residual_phi(double t, const ProblemSetup& setup, const ScalarField& phi,
                                 const ScalarField& f) {
  KahlerMetricField omega = metric_from_potential(setup.background, phi);
  return residual_phi_at(t, setup, phi, f, omega);
}

ScalarField coupled_residual_f(double t, const ProblemSetup& setup, const ScalarField& phi,
                               const ScalarField& f, double kappa) {
  KahlerMetricField omega = metric_from_potential(setup.background, phi);
  return residual_f_at(t, setup, omega, f, kappa);
}

ScalarField coupled_linearized_apply(double t, const ProblemSetup& setup, const ScalarField& phi,
                                     const ScalarField& delta) {
  KahlerMetricField omega = metric_from_potential(setup.background, phi);
  const double c0 = 1.0 / t - setup.classes.lambda;
  return sub(scaled(delta, c0), laplacian(omega, delta));
}

ContinuityState solve_coupled(double t, const ProblemSetup& setup, const ScalarField& phi0,
                              const ScalarField& f0, const SolverConfig& config,
                              const TelemetrySink& sink) {
  config.validate();
  if (!(t > 0.0)) throw Error("solve_coupled: t must be positive");
  if (setup.mode != SystemMode::Coupled) throw Error("solve_coupled: setup mode mismatch");
  require_lambda_regime(setup.classes.lambda);
  require_same_grid(setup.grid, phi0.grid, "solve_coupled");
  require_same_grid(setup.grid, f0.grid, "solve_coupled");
  check_finite(phi0, "initial potential");
  check_finite(f0, "initial companion potential");

  ScalarField phi = phi0;
  ScalarField f = f0;
  KahlerMetricField omega;
  if (!try_metric_from_potential(setup.background, phi, omega))
    throw ConeExit("initial guess lies outside the cone");

  SolveStats stats;
  double joint = std::numeric_limits<double>::infinity();
  for (int outer = 0; outer < config.max_outer; ++outer) {
    ++stats.outer_iterations;
    ScalarField r1 = residual_phi_at(t, setup, phi, f, omega);
    check_finite(r1, "potential residual");
    newton_phi(t, setup, config, config.newton_tol, phi, f, omega, r1, stats, sink);
    solve_companion(t, setup, config, omega, f, stats, sink);
    r1 = residual_phi_at(t, setup, phi, f, omega);
    ScalarField r2 = residual_f_at(t, setup, omega, f, config.kappa);
    joint = std::max(sup_norm(r1), sup_norm(r2));
    emit(sink, "outer", stats.outer_iterations, joint);
    if (joint <= config.outer_tol)
      return finish_coupled_state(SystemMode::Coupled, t, setup, std::move(phi), std::move(f),
                                  std::move(omega), joint, stats);
  }
  throw NoConvergence("alternation budget exhausted", joint, config.max_outer);
}

ContinuityState solve_ke(double t, const ProblemSetup& setup, const ScalarField& phi0,
                         const SolverConfig& config, const TelemetrySink& sink) {
  config.validate();
  if (!(t > 0.0)) throw Error("solve_ke: t must be positive");
  if (setup.mode != SystemMode::KahlerEinstein) throw Error("solve_ke: setup mode mismatch");
  if (sup_abs(setup.alpha_hat) != 0.0)
    throw Error("solve_ke: companion background form must vanish");
  require_lambda_regime(setup.classes.lambda);
  require_same_grid(setup.grid, phi0.grid, "solve_ke");
  check_finite(phi0, "initial potential");

  ScalarField phi = phi0;
  ScalarField f = make_field(setup.grid);
  KahlerMetricField omega;
  if (!try_metric_from_potential(setup.background, phi, omega))
    throw ConeExit("initial guess lies outside the cone");

  SolveStats stats;
  stats.outer_iterations = 1;
  ScalarField r1 = residual_phi_at(t, setup, phi, f, omega);
  check_finite(r1, "potential residual");
  const double tol = std::min(config.newton_tol, config.outer_tol);
  newton_phi(t, setup, config, tol, phi, f, omega, r1, stats, sink);
  const double joint = sup_norm(r1);
  emit(sink, "outer", 1, joint);
  return finish_coupled_state(SystemMode::KahlerEinstein, t, setup, std::move(phi), std::move(f),
                              std::move(omega), joint, stats);
}

ScalarField conformal_residual_u(double t, const ProblemSetup& setup, const ScalarField& u,
                                 const ScalarField& tau) {
  const double lambda = setup.classes.lambda;
  const double ghat = conformal_background_component(setup);
  ScalarField eu = exp_neg(u);
  ScalarField lap_u = scaled(flat_laplacian(u), 1.0 / ghat);
  ScalarField r = make_field(setup.grid);
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    const double e = eu.real_at(i);
    r.values[i] = cplx((1.0 - e) / t - e * lap_u.real_at(i) + setup.rhat.real_at(i) * e -
                           lambda - tau.real_at(i),
                       0.0);
  }
  return r;
}

ScalarField conformal_residual_tau(double t, const ProblemSetup& setup, const ScalarField& u,
                                   const ScalarField& tau, double kappa) {
  const double ghat = conformal_background_component(setup);
  ScalarField eu = exp_neg(u);
  ScalarField lap_tau = scaled(flat_laplacian(tau), 1.0 / ghat);
  ScalarField r = make_field(setup.grid);
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    const double e = eu.real_at(i);
    r.values[i] = cplx((tau.real_at(i) - setup.tauhat.real_at(i) * e) / t -
                           kappa * e * lap_tau.real_at(i),
                       0.0);
  }
  return r;
}

ContinuityState solve_conformal(double t, const ProblemSetup& setup, const ScalarField& u0,
                                const ScalarField& tau0, const SolverConfig& config,
                                const TelemetrySink& sink) {
  config.validate();
  if (!(t > 0.0)) throw Error("solve_conformal: t must be positive");
  if (setup.mode != SystemMode::Conformal) throw Error("solve_conformal: setup mode mismatch");
  require_same_grid(setup.grid, u0.grid, "solve_conformal");
  require_same_grid(setup.grid, tau0.grid, "solve_conformal");
  check_finite(u0, "initial conformal factor");
  check_finite(tau0, "initial trace field");

  const double ghat = conformal_background_component(setup);
  ScalarField u = u0;
  ScalarField tau = tau0;
  SolveStats stats;
  double joint = std::numeric_limits<double>::infinity();
  double prev_joint = std::numeric_limits<double>::infinity();
  // Relaxation on the tau sweep. The u <-> tau alternation map can carry an
  // eigenvalue near -|tau|/|lambda| on the constant mode, so an undamped
  // sweep cycles when the stationary trace is comparable to |lambda|;
  // halving the step on non-decrease restores contraction.
  double theta = 1.0;

  for (int outer = 0; outer < config.max_outer; ++outer) {
    ++stats.outer_iterations;

    // Newton on the curvature equation with tau frozen.
    ScalarField r1 = conformal_residual_u(t, setup, u, tau);
    check_finite(r1, "conformal residual");
    double sup = sup_norm(r1);
    int iters = 0;
    while (sup > config.newton_tol) {
      if (iters >= config.max_newton)
        throw NoConvergence("newton iteration budget exhausted", sup, iters);
      ++iters;
      ++stats.newton_iterations;

      // d r1 / du [x] = e^{-u} ((1/t + lap u - rhat) x - lap x). The e^{-u}
      // row scaling is dropped by moving it onto the right-hand side, which
      // leaves a symmetric multiplication-plus-Laplacian system.
      ScalarField coeff = sub(scaled(flat_laplacian(u), 1.0 / ghat), setup.rhat);
      LinearOp apply = [&](const std::vector<double>& x) {
        ScalarField xf = from_vector(setup.grid, x);
        ScalarField lap_x = scaled(flat_laplacian(xf), 1.0 / ghat);
        std::vector<double> out(x.size());
        for (std::size_t i = 0; i < out.size(); ++i)
          out[i] = (1.0 / t + coeff.real_at(i)) * xf.real_at(i) - lap_x.real_at(i);
        return out;
      };
      const double q_bar = std::max(1.0 / t + mean(coeff), 1e-8);
      LinearOp precond = [&](const std::vector<double>& r) {
        return to_vector(
            solve_flat_helmholtz(from_vector(setup.grid, r), q_bar, 1.0 / ghat));
      };
      std::vector<double> rhs(setup.grid.total_nodes());
      for (std::size_t i = 0; i < rhs.size(); ++i)
        rhs[i] = -r1.real_at(i) * std::exp(u.real_at(i));
      std::vector<double> delta(setup.grid.total_nodes(), 0.0);
      KrylovResult kr = bicgstab(apply, precond, rhs, delta, config.krylov_tol,
                                 config.krylov_max);
      stats.krylov_iterations += kr.iterations;
      if (!kr.converged)
        throw NoConvergence("newton linear solve stalled", kr.relative_residual, kr.iterations);

      ScalarField du = from_vector(setup.grid, delta);
      double step = 1.0;
      bool accepted = false;
      while (step >= config.min_step) {
        ScalarField cand = add(u, scaled(du, step));
        ScalarField r1c = conformal_residual_u(t, setup, cand, tau);
        const double supc = sup_norm(r1c);
        if (supc < sup) {
          u = std::move(cand);
          r1 = std::move(r1c);
          sup = supc;
          accepted = true;
          break;
        }
        step *= 0.5;
        ++stats.backtracks;
      }
      if (!accepted)
        throw NoConvergence("newton backtracking found no decrease", sup,
                            stats.newton_iterations);
      emit(sink, "newton", stats.newton_iterations, sup);
    }

    // Exact linear solve for tau in the symmetrized form
    // (e^u / t - kappa lap) tau = tauhat / t.
    ScalarField eu_pos = map_field(u, [](cplx v) { return std::exp(v.real()); });
    LinearOp apply_tau = [&](const std::vector<double>& x) {
      ScalarField xf = from_vector(setup.grid, x);
      ScalarField lap_x = scaled(flat_laplacian(xf), 1.0 / ghat);
      std::vector<double> out(x.size());
      for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = eu_pos.real_at(i) * xf.real_at(i) / t - config.kappa * lap_x.real_at(i);
      return out;
    };
    const double e_bar = mean(eu_pos);
    LinearOp precond_tau = [&](const std::vector<double>& r) {
      return to_vector(
          solve_flat_helmholtz(from_vector(setup.grid, r), e_bar / t, config.kappa / ghat));
    };
    std::vector<double> x = to_vector(tau);
    KrylovResult kr = bicgstab(apply_tau, precond_tau, to_vector(scaled(setup.tauhat, 1.0 / t)),
                               x, config.krylov_tol, config.krylov_max);
    stats.krylov_iterations += kr.iterations;
    if (!kr.converged)
      throw NoConvergence("trace linear solve stalled", kr.relative_residual, kr.iterations);
    // Relaxed tau update, also capped so the next Newton solve starts inside
    // its basin; cold starts otherwise jump tau by O(|lambda|) at once.
    ScalarField dtau = sub(from_vector(setup.grid, x), tau);
    const double jump = sup_norm(dtau);
    const double cap = 0.5 * (1.0 + sup_norm(tau));
    double step = theta;
    if (jump * step > cap) step = cap / jump;
    tau = add(tau, scaled(dtau, step));
    emit(sink, "tau-solve", kr.iterations, kr.relative_residual);

    joint = std::max(sup_norm(conformal_residual_u(t, setup, u, tau)),
                     sup_norm(conformal_residual_tau(t, setup, u, tau, config.kappa)));
    emit(sink, "outer", stats.outer_iterations, joint);
    if (joint > 0.9 * prev_joint)
      theta = std::max(theta * 0.5, 1.0 / 64.0);
    else
      theta = std::min(theta * 1.4, 1.0);
    prev_joint = joint;
    if (joint <= config.outer_tol) {
      ContinuityState state;
      state.mode = SystemMode::Conformal;
      state.t = t;
      state.phi = u;
      state.f = make_field(setup.grid);

      // omega = e^u * background, alpha = tau * omega, R = e^{-u}(rhat - lap u).
      HermitianFormField gc = zero_form(setup.grid);
      HermitianFormField ac = zero_form(setup.grid);
      ScalarField lap_u = scaled(flat_laplacian(u), 1.0 / ghat);
      ScalarField R = make_field(setup.grid);
      for (std::size_t i = 0; i < setup.grid.total_nodes(); ++i) {
        const double eu_i = std::exp(u.real_at(i));
        gc.at(i, 0, 0) = cplx(ghat * eu_i, 0.0);
        ac.at(i, 0, 0) = cplx(tau.real_at(i) * ghat * eu_i, 0.0);
        R.values[i] =
            cplx((setup.rhat.real_at(i) - lap_u.real_at(i)) / eu_i, 0.0);
      }
      state.omega = make_metric(gc);
      state.alpha = ac;
      state.tau = tau;
      state.scalar_curv = R;
      state.residual_joint = joint;
      state.stats = stats;
      return state;
    }
  }
  throw NoConvergence("alternation budget exhausted", joint, config.max_outer);
}

std::pair<double, double> stationarity_residual(const ContinuityState& state,
                                                const ProblemSetup& setup) {
  if (state.mode == SystemMode::Conformal) {
    // n = 1 synthetic surface: Ric(omega) = R * omega with the prescribed
    // curvature folded into R, so the stationary form is (lambda + tau - R)
    // times omega; harmonicity of alpha = tau * omega reduces to hess(tau).
    double first = 0.0;
    for (std::size_t i = 0; i < setup.grid.total_nodes(); ++i) {
      const double c = setup.classes.lambda + state.tau.real_at(i) -
                       state.scalar_curv.real_at(i);
      first = std::max(first, std::abs(c) * std::exp(state.phi.real_at(i)));
    }
    const double second = form_sup_vs(setup.background, complex_hessian(state.tau));
    return {first, second};
  }
  HermitianFormField stat = add(
      add(scaled(ricci(state.omega), -1.0), scaled(state.omega.g, setup.classes.lambda)),
      state.alpha);
  stat = add(stat, setup.defect);
  const double first = form_sup_vs(setup.background, stat);
  const double second =
      form_sup_vs(setup.background, form_laplacian_closed(state.omega, state.alpha));
  return {first, second};
}

}  // namespace contlab
