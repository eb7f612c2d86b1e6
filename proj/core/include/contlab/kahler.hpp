#pragma once

#include <utility>

#include "contlab/form.hpp"
#include "contlab/spectral.hpp"

namespace contlab {

/// g = background + complex_hessian(potential); throws NotPositiveDefinite
/// when the candidate leaves the cone.
KahlerMetricField metric_from_potential(const KahlerMetricField& background,
                                        const ScalarField& potential);

/// Probe variant for line searches: returns false instead of throwing.
bool try_metric_from_potential(const KahlerMetricField& background, const ScalarField& potential,
                               KahlerMetricField& out);

/// Node-wise log of the metric determinant.
ScalarField log_det(const KahlerMetricField& m);

/// Ricci form: minus the complex Hessian of log det g. Exactly Hermitian and
/// discretely closed by construction.
HermitianFormField ricci(const KahlerMetricField& m);

/// Metric trace of a form, tr(g^{-1} h) node-wise. Exactly real: conjugate
/// component pairs are folded analytically before summation.
ScalarField trace(const KahlerMetricField& m, const HermitianFormField& form);

/// Scalar Laplacian on functions: trace of the complex Hessian.
ScalarField laplacian(const KahlerMetricField& m, const ScalarField& h);

/// Relative sup of the spectral exterior derivative of the form; identically
/// zero for n = 1 where every (1,1)-form is top degree.
double closedness_residual(const HermitianFormField& form);

/// Laplacian of a closed (1,1)-form through the trace identity:
/// complex_hessian(trace(m, form)). Rejects forms failing the closedness
/// check (relative residual above 1e-8).
HermitianFormField form_laplacian_closed(const KahlerMetricField& m,
                                         const HermitianFormField& form);

/// Independent surface-only route to the same operator through the metric
/// connection and the codifferential; kept deliberately free of the trace
/// identity so the two evaluations cross-check each other. n = 1 only.
HermitianFormField hodge_laplacian_surface_oracle(const KahlerMetricField& m,
                                                  const HermitianFormField& form);

/// R = trace of the Ricci form.
ScalarField scalar_curvature(const KahlerMetricField& m);

/// Global (min, max) over nodes of the generalized eigenvalues of the metric
/// relative to the reference, i.e. the best constants in
/// min * reference <= metric <= max * reference.
std::pair<double, double> eigen_bounds(const KahlerMetricField& reference,
                                       const KahlerMetricField& m);

/// Sup over nodes of the spectral radius of reference^{-1} * form: the
/// natural size of a (possibly indefinite) form measured against a metric.
double form_sup_vs(const KahlerMetricField& reference, const HermitianFormField& form);

/// The determinant as a real field (the volume density against flat measure).
ScalarField det_field(const KahlerMetricField& m);

/// Total volume, integral of the determinant.
double volume(const KahlerMetricField& m);

/// Integral and average of f against the metric volume density.
double volume_integral(const KahlerMetricField& m, const ScalarField& f);
double volume_mean(const KahlerMetricField& m, const ScalarField& f);

}  // namespace contlab
