#pragma once

#include <cstddef>
#include <vector>

#include "contlab/field.hpp"
#include "contlab/form.hpp"
#include "contlab/system.hpp"

namespace contlab::oracle {

/// Brute-force cross-checks for the fast spectral paths. Everything here is
/// deliberately dense and slow; grids are hard-capped so a misplaced call
/// cannot blow up a run. Nothing below the raw field storage is shared with
/// the production operators.

enum class OperatorTag { FdLaplacian, JacobianFd };

struct DenseOperator {
  OperatorTag tag = OperatorTag::FdLaplacian;
  GridSpec grid;
  std::size_t size = 0;
  std::vector<cplx> a;  // row-major size x size

  cplx& at(std::size_t r, std::size_t c) { return a[r * size + c]; }
  const cplx& at(std::size_t r, std::size_t c) const { return a[r * size + c]; }

  ScalarField apply(const ScalarField& h) const;
  double symmetry_defect() const;  // max |a_rc - a_cr|
};

/// Second-order centered-difference discretization of the metric Laplacian
/// g^{jk} d_j dbar_k, coefficients frozen at the row node. Grids above
/// 32 (n = 1) or 8 (n = 2) points per axis throw GridTooLarge.
DenseOperator fd_laplacian_oracle(const KahlerMetricField& metric);

/// Central-difference directional derivative of the first coupled residual in
/// phi (f held fixed) against the analytic linearization. The direction is
/// sup-normalized, the step is 1e-5, and the return value is the relative
/// sup-norm error.
double jacobian_fd_check(double t, const ProblemSetup& setup, const ScalarField& phi,
                         const ScalarField& f, const ScalarField& direction);

/// A setup back-computed so that prescribed target fields solve the t-system
/// exactly; used as recovery fixtures for the solvers.
struct ManufacturedCoupled {
  ProblemSetup setup;
  double t = 1.0;
  double kappa = 1.0;
  ScalarField phi_star;
  ScalarField f_star;
};

/// Chooses alpha_hat = hess(p) + c * background and the source potential so
/// that (phi_star, f_star) is an exact solution at parameter t. The closed
/// form of alpha_hat costs one variable-coefficient Poisson solve; its
/// residual is driven to Krylov tolerance, so recovery accuracy is limited by
/// that solve, not by construction error.
ManufacturedCoupled manufacture_coupled(const KahlerMetricField& background,
                                        const ScalarField& phi_star, const ScalarField& f_star,
                                        double t, double lambda = -1.0, double kappa = 1.0);

/// Single-equation variant: alpha_hat = 0, companion potential zero, and the
/// source potential absorbs the full target residual. lambda = 0 is the
/// natural class value; negative values give twisted recovery fixtures.
ManufacturedCoupled manufacture_ke(const KahlerMetricField& background,
                                   const ScalarField& phi_star, double t, double lambda = 0.0);

struct ManufacturedConformal {
  ProblemSetup setup;
  double t = 1.0;
  double kappa = 1.0;
  ScalarField u_star;
  ScalarField tau_star;
};

/// Back-computes the prescribed curvature and trace sources from the targets:
/// rhat = e^u (lambda + tau - (1 - e^-u)/t) + lap u, tauhat = e^u tau
/// - kappa t lap tau. lambda is taken as given rather than re-derived from
/// the sources; the resulting setup is a solver fixture, not a class-data
/// consistency case.
ManufacturedConformal manufacture_conformal(const KahlerMetricField& background,
                                            const ScalarField& u_star,
                                            const ScalarField& tau_star, double t,
                                            double lambda = -1.0, double kappa = 1.0);

}  // namespace contlab::oracle
