#pragma once

#include <vector>

#include "contlab/kahler.hpp"

namespace contlab {

/// KahlerTorus: genuine flat-torus backgrounds, curvature derived from the
/// metric. ConformalSynthetic: surface testbeds where the background
/// curvature field is prescribed directly.
enum class BackgroundMode { KahlerTorus, ConformalSynthetic };

/// The constants fixed by the background classes: total volume, average
/// scalar curvature, average trace of the companion form, and the constant
/// lambda = (r_bar - tau_bar) / n they determine.
struct ClassData {
  double volume = 0.0;
  double r_bar = 0.0;
  double tau_bar = 0.0;
  double lambda = 0.0;
  BackgroundMode mode = BackgroundMode::KahlerTorus;
};

ClassData compute_class_data(const KahlerMetricField& background,
                             const HermitianFormField& alpha_hat, BackgroundMode mode);

/// Synthetic variant (n = 1): curvature and trace data are prescribed fields
/// averaged against the background volume.
ClassData compute_class_data_conformal(const KahlerMetricField& background,
                                       const ScalarField& rhat, const ScalarField& tauhat);

/// Potential whose complex Hessian reproduces
/// -ricci(background) + lambda * background + alpha_hat, normalized mean-zero
/// against the background volume. Throws CompatibilityFailure when the class
/// condition fails (pre-gate on the traced integral, post-check on the
/// reconstructed form).
ScalarField ricci_potential(const KahlerMetricField& background,
                            const HermitianFormField& alpha_hat, double lambda);

struct ClassConservationEntry {
  double omega_integral = 0.0;  // total volume of the evolving metric
  double alpha_integral = 0.0;  // companion form paired against the background
  double alpha_scale = 0.0;     // L1 size of the pairing, the honest relative
                                // scale when the conserved value itself is 0
};

struct ClassConservationReport {
  std::vector<ClassConservationEntry> entries;
  double omega_drift = 0.0;  // max relative deviation from the first entry
  double alpha_drift = 0.0;
  bool flagged = false;  // any drift above 1e-10
};

ClassConservationEntry class_integrals(const KahlerMetricField& background,
                                       const KahlerMetricField& omega,
                                       const HermitianFormField& alpha);

ClassConservationReport summarize_class_conservation(
    const std::vector<ClassConservationEntry>& entries);

}  // namespace contlab
