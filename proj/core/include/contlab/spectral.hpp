#pragma once

#include <vector>

#include "contlab/field.hpp"
#include "contlab/form.hpp"

namespace contlab {

/// Unnormalized forward DFT of the node values (mode convention e^{+i k.x}:
/// the coefficient at folded index m multiplies e^{i (2π m / period) x}).
std::vector<cplx> dft_forward(const GridSpec& g, const std::vector<cplx>& values);

/// Inverse of dft_forward, including the 1/total_nodes factor.
std::vector<cplx> dft_inverse(const GridSpec& g, std::vector<cplx> coeffs);

/// Signed wavenumber for each index along one axis, with the unpaired
/// symmetry-breaking index (points_per_axis / 2) pinned to zero. Every
/// derivative below reads this one table, so compositions of operators agree
/// with single multiplier products exactly.
std::vector<double> wavenumbers(const GridSpec& g);

/// d/dx_axis by spectral multiplier i*k.
ScalarField partial_axis(const ScalarField& f, int axis);

/// Holomorphic derivative along complex direction j (0-based):
/// 0.5 * (d/dx^j - i d/dy^j).
ScalarField partial_z(const ScalarField& f, int j);

/// Anti-holomorphic derivative: 0.5 * (d/dx^j + i d/dy^j).
ScalarField partial_zbar(const ScalarField& f, int j);

/// Mixed complex Hessian h_{j kbar} = partial_z^j partial_zbar^k applied to a
/// real field. The result is exactly Hermitian: entries with j <= k are
/// transformed, the rest conjugated, and diagonals carry no imaginary part.
HermitianFormField complex_hessian(const ScalarField& f);

/// Trace of the complex Hessian against the flat background: sum over j of
/// partial_z^j partial_zbar^j. For n = 1 the symbol is -(k_x^2 + k_y^2)/4.
ScalarField flat_laplacian(const ScalarField& f);

/// Solves (c0 - c1 * flat_laplacian) u = rhs by diagonal division in mode
/// space. Modes annihilated by the symbol (only the mean once c0 = 0, for
/// band-limited data) are projected out of u. Requires c0 >= 0, c1 >= 0, not
/// both zero.
ScalarField solve_flat_helmholtz(const ScalarField& rhs, double c0, double c1);

/// General constant-coefficient version: solves (c0 - c1 * L) u = rhs where
/// L is the scalar Laplacian of a constant Hermitian positive inverse metric
/// (row-major n x n matrix). Same projection rule for annihilated modes.
ScalarField solve_constant_helmholtz(const ScalarField& rhs,
                                     const std::vector<cplx>& inverse_metric, double c0,
                                     double c1);

}  // namespace contlab
