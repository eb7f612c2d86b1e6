#include "contlab/classes.hpp"

#include <cmath>
#include <string>

#include "contlab/errors.hpp"
#include "contlab/krylov.hpp"

namespace contlab {

namespace {

bool constant_coefficients(const HermitianFormField& h) {
  const std::size_t nn = static_cast<std::size_t>(h.grid.n) * h.grid.n;
  double dev = 0.0;
  for (std::size_t i = nn; i < h.comps.size(); ++i)
    dev = std::max(dev, std::abs(h.comps[i] - h.comps[i % nn]));
  return dev <= 1e-13 * std::max(sup_abs(h), 1.0);
}

}  // namespace

ClassData compute_class_data(const KahlerMetricField& background,
                             const HermitianFormField& alpha_hat, BackgroundMode mode) {
  if (mode != BackgroundMode::KahlerTorus)
    throw Error("compute_class_data: prescribed-curvature backgrounds take the conformal variant");
  require_same_grid(background.grid(), alpha_hat.grid, "compute_class_data");
  if (closedness_residual(alpha_hat) > 1e-8)
    throw Error("compute_class_data: companion background form is not closed");
  ClassData cd;
  cd.mode = mode;
  cd.volume = volume(background);
  cd.r_bar = volume_mean(background, scalar_curvature(background));
  cd.tau_bar = volume_mean(background, trace(background, alpha_hat));
  cd.lambda = (cd.r_bar - cd.tau_bar) / background.grid().n;
  return cd;
}

ClassData compute_class_data_conformal(const KahlerMetricField& background,
                                       const ScalarField& rhat, const ScalarField& tauhat) {
  if (background.grid().n != 1)
    throw Error("compute_class_data_conformal: surface mode needs n = 1");
  require_same_grid(background.grid(), rhat.grid, "compute_class_data_conformal");
  require_same_grid(background.grid(), tauhat.grid, "compute_class_data_conformal");
  ClassData cd;
  cd.mode = BackgroundMode::ConformalSynthetic;
  cd.volume = volume(background);
  cd.r_bar = volume_mean(background, rhat);
  cd.tau_bar = volume_mean(background, tauhat);
  cd.lambda = cd.r_bar - cd.tau_bar;
  return cd;
}

ScalarField ricci_potential(const KahlerMetricField& background,
                            const HermitianFormField& alpha_hat, double lambda) {
  require_same_grid(background.grid(), alpha_hat.grid, "ricci_potential");
  if (closedness_residual(alpha_hat) > 1e-8)
    throw CompatibilityFailure("ricci_potential: companion form is not closed");
  const GridSpec& grid = background.grid();

  HermitianFormField form =
      add(add(scaled(ricci(background), -1.0), scaled(background.g, lambda)), alpha_hat);
  ScalarField tr = trace(background, form);
  const double scale = 1.0 + sup_abs(form);
  const double traced_integral = volume_integral(background, tr);
  if (std::abs(traced_integral) > 1e-8 * volume(background) * scale)
    throw CompatibilityFailure("ricci_potential: traced class integral " +
                               std::to_string(traced_integral) + " is not zero");

  ScalarField pot;
  if (constant_coefficients(background.g)) {
    const std::size_t nn = static_cast<std::size_t>(grid.n) * grid.n;
    std::vector<cplx> inv(background.inv.begin(), background.inv.begin() + nn);
    // (0 - L) pot = -tr, i.e. L pot = tr, with the mean projected out.
    pot = solve_constant_helmholtz(scaled(tr, -1.0), inv, 0.0, 1.0);
  } else {
    auto project = [&](const ScalarField& f) {
      return shifted(f, -volume_mean(background, f));
    };
    std::vector<cplx> avg_inv = averaged_inverse(background);

    LinearOp apply = [&](const std::vector<double>& u) {
      return to_vector(project(laplacian(background, from_vector(grid, u))));
    };
    LinearOp precond = [&](const std::vector<double>& r) {
      ScalarField rf = from_vector(grid, r);
      return to_vector(solve_constant_helmholtz(scaled(rf, -1.0), avg_inv, 0.0, 1.0));
    };
    std::vector<double> x(grid.total_nodes(), 0.0);
    KrylovResult kr = bicgstab(apply, precond, to_vector(project(tr)), x, 1e-12, 500);
    if (!kr.converged)
      throw NoConvergence("ricci_potential: projected solve stalled", kr.relative_residual,
                          kr.iterations);
    pot = from_vector(grid, x);
  }

  pot = shifted(pot, -volume_mean(background, pot));
  const double defect = sup_abs(sub(complex_hessian(pot), form));
  if (defect > 1e-8 * scale)
    throw CompatibilityFailure(
        "ricci_potential: reconstructed form misses the target by " + std::to_string(defect) +
        " (class obstruction)");
  return pot;
}

ClassConservationEntry class_integrals(const KahlerMetricField& background,
                                       const KahlerMetricField& omega,
                                       const HermitianFormField& alpha) {
  require_same_grid(background.grid(), omega.grid(), "class_integrals");
  require_same_grid(background.grid(), alpha.grid, "class_integrals");
  ClassConservationEntry e;
  e.omega_integral = volume(omega);
  ScalarField tr = trace(background, alpha);
  e.alpha_integral = volume_integral(background, tr);
  e.alpha_scale =
      volume_integral(background, map_field(tr, [](cplx v) { return std::abs(v.real()); }));
  return e;
}

ClassConservationReport summarize_class_conservation(
    const std::vector<ClassConservationEntry>& entries) {
  if (entries.size() < 2)
    throw Error("class conservation report needs at least two states");
  ClassConservationReport report;
  report.entries = entries;
  const double w0 = entries.front().omega_integral;
  const double a0 = entries.front().alpha_integral;
  const double ascale = std::max({std::abs(a0), entries.front().alpha_scale, 1e-30});
  for (const ClassConservationEntry& e : entries) {
    report.omega_drift = std::max(
        report.omega_drift, std::abs(e.omega_integral - w0) / std::max(std::abs(w0), 1e-30));
    report.alpha_drift =
        std::max(report.alpha_drift, std::abs(e.alpha_integral - a0) / ascale);
  }
  report.flagged = report.omega_drift > 1e-10 || report.alpha_drift > 1e-10;
  return report;
}

}  // namespace contlab
