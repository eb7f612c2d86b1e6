#pragma once

#include <vector>

#include "contlab/field.hpp"

namespace contlab {

/// Pointwise Hermitian coefficient matrix of a real (1,1)-form written as
/// i * h_{j kbar} dz^j ^ dzbar^k. Component (j, k) carries one holomorphic and
/// one anti-holomorphic index; reality of the form is Hermiticity of h.
/// Storage is node-major with the n*n matrix row-major per node.
struct HermitianFormField {
  GridSpec grid;
  std::vector<cplx> comps;

  cplx& at(std::size_t node, int j, int k) {
    return comps[node * grid.n * grid.n + static_cast<std::size_t>(j) * grid.n + k];
  }
  const cplx& at(std::size_t node, int j, int k) const {
    return comps[node * grid.n * grid.n + static_cast<std::size_t>(j) * grid.n + k];
  }
};

HermitianFormField zero_form(const GridSpec& g);
HermitianFormField constant_form(const GridSpec& g, const std::vector<cplx>& matrix_row_major);

HermitianFormField add(const HermitianFormField& a, const HermitianFormField& b);
HermitianFormField sub(const HermitianFormField& a, const HermitianFormField& b);
HermitianFormField scaled(const HermitianFormField& a, double s);
void axpy(HermitianFormField& y, double a, const HermitianFormField& x);

/// Largest pointwise operator norm of the coefficient matrix, i.e. the sup of
/// the matrix 2-norm over nodes. For n = 1 this is just sup |h|.
double sup_abs(const HermitianFormField& h);

/// sup over nodes of |h_{jk} - conj(h_{kj})|; zero for exactly stored forms.
double hermiticity_defect(const HermitianFormField& h);

void check_finite(const HermitianFormField& h, const char* what);

/// A positive definite Hermitian form together with the derived node data the
/// geometry operations need: determinant, inverse, and the smallest eigenvalue
/// seen anywhere (the positivity margin).
struct KahlerMetricField {
  HermitianFormField g;
  std::vector<double> det;
  std::vector<cplx> inv;  // same layout as g.comps
  double min_eigenvalue = 0.0;

  const GridSpec& grid() const { return g.grid; }
  cplx inv_at(std::size_t node, int j, int k) const {
    return inv[node * g.grid.n * g.grid.n + static_cast<std::size_t>(j) * g.grid.n + k];
  }
};

/// Builds the derived data, throwing NotPositiveDefinite if any node has an
/// eigenvalue below the positivity floor.
KahlerMetricField make_metric(const HermitianFormField& h);

/// Same but reports failure through the return value (empty optional-style:
/// ok flag) so line searches can probe candidate metrics cheaply.
bool try_make_metric(const HermitianFormField& h, KahlerMetricField& out);

KahlerMetricField flat_metric(const GridSpec& g, double scale = 1.0);

/// Node-average of the cached inverse matrix: the natural constant
/// coefficient stand-in when preconditioning variable-coefficient solves.
std::vector<cplx> averaged_inverse(const KahlerMetricField& m);

}  // namespace contlab
