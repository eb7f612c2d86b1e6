#include "contlab/form.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "contlab/errors.hpp"

namespace contlab {

namespace {

constexpr double kPositivityFloor = 1e-8;

void require_same(const HermitianFormField& a, const HermitianFormField& b) {
  require_same_grid(a.grid, b.grid, "form arithmetic");
}

}  // namespace

HermitianFormField zero_form(const GridSpec& g) {
  g.validate();
  HermitianFormField h;
  h.grid = g;
  h.comps.assign(g.total_nodes() * g.n * g.n, cplx(0.0, 0.0));
  return h;
}

HermitianFormField constant_form(const GridSpec& g, const std::vector<cplx>& matrix_row_major) {
  if (matrix_row_major.size() != static_cast<std::size_t>(g.n) * g.n)
    throw Error("constant_form: matrix size does not match grid dimension");
  HermitianFormField h = zero_form(g);
  const std::size_t nn = static_cast<std::size_t>(g.n) * g.n;
  for (std::size_t node = 0; node < g.total_nodes(); ++node)
    std::copy(matrix_row_major.begin(), matrix_row_major.end(), h.comps.begin() + node * nn);
  return h;
}

HermitianFormField add(const HermitianFormField& a, const HermitianFormField& b) {
  require_same(a, b);
  HermitianFormField out = a;
  for (std::size_t i = 0; i < out.comps.size(); ++i) out.comps[i] += b.comps[i];
  return out;
}

HermitianFormField sub(const HermitianFormField& a, const HermitianFormField& b) {
  require_same(a, b);
  HermitianFormField out = a;
  for (std::size_t i = 0; i < out.comps.size(); ++i) out.comps[i] -= b.comps[i];
  return out;
}

HermitianFormField scaled(const HermitianFormField& a, double s) {
  HermitianFormField out = a;
  for (cplx& c : out.comps) c *= s;
  return out;
}

void axpy(HermitianFormField& y, double a, const HermitianFormField& x) {
  require_same(y, x);
  for (std::size_t i = 0; i < y.comps.size(); ++i) y.comps[i] += a * x.comps[i];
}

double sup_abs(const HermitianFormField& h) {
  const int n = h.grid.n;
  double sup = 0.0;
  if (n == 1) {
    for (const cplx& c : h.comps) sup = std::max(sup, std::abs(c));
    return sup;
  }
  for (std::size_t node = 0; node < h.grid.total_nodes(); ++node) {
    // 2-norm of a 2x2 Hermitian matrix: max |eigenvalue|.
    const double a = h.at(node, 0, 0).real();
    const double c = h.at(node, 1, 1).real();
    const cplx b = h.at(node, 0, 1);
    const double half_gap = std::sqrt(0.25 * (a - c) * (a - c) + std::norm(b));
    const double mid = 0.5 * (a + c);
    sup = std::max({sup, std::abs(mid + half_gap), std::abs(mid - half_gap)});
  }
  return sup;
}

double hermiticity_defect(const HermitianFormField& h) {
  const int n = h.grid.n;
  double sup = 0.0;
  for (std::size_t node = 0; node < h.grid.total_nodes(); ++node)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        sup = std::max(sup, std::abs(h.at(node, j, k) - std::conj(h.at(node, k, j))));
  return sup;
}

void check_finite(const HermitianFormField& h, const char* what) {
  for (const cplx& c : h.comps)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw NonFiniteField(what);
}

namespace {

// Fills det/inv/min_eigenvalue; returns false (with the offending node data in
// out.min_eigenvalue) when positivity fails.
bool build_metric_data(const HermitianFormField& h, KahlerMetricField& out, std::size_t& bad_node) {
  const int n = h.grid.n;
  const std::size_t nodes = h.grid.total_nodes();
  out.g = h;
  out.det.assign(nodes, 0.0);
  out.inv.assign(h.comps.size(), cplx(0.0, 0.0));
  out.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (std::size_t node = 0; node < nodes; ++node) {
    if (n == 1) {
      const double a = h.at(node, 0, 0).real();
      out.det[node] = a;
      out.min_eigenvalue = std::min(out.min_eigenvalue, a);
      if (a <= kPositivityFloor) {
        bad_node = node;
        out.min_eigenvalue = a;
        return false;
      }
      out.inv[node] = cplx(1.0 / a, 0.0);
    } else {
      const double a = h.at(node, 0, 0).real();
      const double c = h.at(node, 1, 1).real();
      const cplx b = h.at(node, 0, 1);
      const double mid = 0.5 * (a + c);
      const double half_gap = std::sqrt(0.25 * (a - c) * (a - c) + std::norm(b));
      const double lambda_min = mid - half_gap;
      out.min_eigenvalue = std::min(out.min_eigenvalue, lambda_min);
      if (lambda_min <= kPositivityFloor) {
        bad_node = node;
        out.min_eigenvalue = lambda_min;
        return false;
      }
      const double det = a * c - std::norm(b);
      out.det[node] = det;
      const std::size_t base = node * 4;
      out.inv[base + 0] = cplx(c / det, 0.0);
      out.inv[base + 1] = -h.at(node, 0, 1) / det;
      out.inv[base + 2] = -h.at(node, 1, 0) / det;
      out.inv[base + 3] = cplx(a / det, 0.0);
    }
  }
  return true;
}

}  // namespace

KahlerMetricField make_metric(const HermitianFormField& h) {
  check_finite(h, "metric coefficients");
  KahlerMetricField out;
  std::size_t bad_node = 0;
  if (!build_metric_data(h, out, bad_node))
    throw NotPositiveDefinite(bad_node, out.min_eigenvalue);
  return out;
}

bool try_make_metric(const HermitianFormField& h, KahlerMetricField& out) {
  check_finite(h, "metric coefficients");
  std::size_t bad_node = 0;
  return build_metric_data(h, out, bad_node);
}

KahlerMetricField flat_metric(const GridSpec& g, double scale) {
  if (!(scale > 0.0)) throw Error("flat_metric: scale must be positive");
  std::vector<cplx> m(static_cast<std::size_t>(g.n) * g.n, cplx(0.0, 0.0));
  for (int j = 0; j < g.n; ++j) m[static_cast<std::size_t>(j) * g.n + j] = cplx(scale, 0.0);
  return make_metric(constant_form(g, m));
}

std::vector<cplx> averaged_inverse(const KahlerMetricField& m) {
  const std::size_t nn = static_cast<std::size_t>(m.grid().n) * m.grid().n;
  const std::size_t nodes = m.grid().total_nodes();
  std::vector<cplx> avg(nn, cplx(0.0, 0.0));
  for (std::size_t node = 0; node < nodes; ++node)
    for (std::size_t e = 0; e < nn; ++e) avg[e] += m.inv[node * nn + e];
  for (cplx& c : avg) c /= static_cast<double>(nodes);
  return avg;
}

}  // namespace contlab
