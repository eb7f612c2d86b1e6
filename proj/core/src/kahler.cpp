#include "contlab/kahler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "contlab/errors.hpp"

namespace contlab {

namespace {

constexpr double kClosednessTol = 1e-8;

ScalarField component_field(const HermitianFormField& h, int j, int k) {
  ScalarField out = make_field(h.grid, FieldKind::Complex);
  for (std::size_t node = 0; node < out.values.size(); ++node) out.values[node] = h.at(node, j, k);
  return out;
}

}  // namespace

KahlerMetricField metric_from_potential(const KahlerMetricField& background,
                                        const ScalarField& potential) {
  require_same_grid(background.grid(), potential.grid, "metric_from_potential");
  return make_metric(add(background.g, complex_hessian(potential)));
}

bool try_metric_from_potential(const KahlerMetricField& background, const ScalarField& potential,
                               KahlerMetricField& out) {
  require_same_grid(background.grid(), potential.grid, "metric_from_potential");
  return try_make_metric(add(background.g, complex_hessian(potential)), out);
}

ScalarField log_det(const KahlerMetricField& m) {
  ScalarField out = make_field(m.grid(), FieldKind::Real);
  for (std::size_t node = 0; node < out.values.size(); ++node)
    out.values[node] = cplx(std::log(m.det[node]), 0.0);
  return out;
}

HermitianFormField ricci(const KahlerMetricField& m) {
  return scaled(complex_hessian(log_det(m)), -1.0);
}

ScalarField trace(const KahlerMetricField& m, const HermitianFormField& form) {
  require_same_grid(m.grid(), form.grid, "trace");
  const int n = m.grid().n;
  ScalarField out = make_field(m.grid(), FieldKind::Real);
  for (std::size_t node = 0; node < out.values.size(); ++node) {
    double t = 0.0;
    for (int j = 0; j < n; ++j) t += m.inv_at(node, j, j).real() * form.at(node, j, j).real();
    for (int j = 0; j < n; ++j)
      for (int k = j + 1; k < n; ++k)
        t += 2.0 * (m.inv_at(node, j, k) * form.at(node, k, j)).real();
    out.values[node] = cplx(t, 0.0);
  }
  return out;
}

ScalarField laplacian(const KahlerMetricField& m, const ScalarField& h) {
  return trace(m, complex_hessian(h));
}

double closedness_residual(const HermitianFormField& form) {
  if (form.grid.n == 1) return 0.0;
  double sup = 0.0;
  for (int k = 0; k < form.grid.n; ++k) {
    ScalarField c0 = component_field(form, 0, k);
    ScalarField c1 = component_field(form, 1, k);
    ScalarField d = sub(partial_z(c1, 0), partial_z(c0, 1));
    sup = std::max(sup, sup_norm(d));
  }
  const double scale = sup_abs(form);
  return scale > 0.0 ? sup / scale : sup;
}

HermitianFormField form_laplacian_closed(const KahlerMetricField& m,
                                         const HermitianFormField& form) {
  require_same_grid(m.grid(), form.grid, "form_laplacian_closed");
  const double closed = closedness_residual(form);
  if (closed > kClosednessTol)
    throw Error("form_laplacian_closed: input form is not closed (relative residual " +
                std::to_string(closed) + ")");
  return complex_hessian(trace(m, form));
}

HermitianFormField hodge_laplacian_surface_oracle(const KahlerMetricField& m,
                                                  const HermitianFormField& form) {
  require_same_grid(m.grid(), form.grid, "hodge_laplacian_surface_oracle");
  if (m.grid().n != 1) throw Error("hodge_laplacian_surface_oracle is defined for n = 1 only");

  // Work with the single components G (metric, real) and B (form, real).
  ScalarField G = to_real_checked(component_field(m.g, 0, 0), sup_abs(m.g), "metric component");
  ScalarField B =
      to_real_checked(component_field(form, 0, 0), std::max(sup_abs(form), 1.0), "form component");

  // Codifferential of the (1,1)-form through the metric connection:
  // the connection coefficient is G^{-1} dz G, the covariant divergence is
  // dzbar B - conj(connection) B, and lowering with -i G^{-1} produces the
  // (0,1)-form s. Its conjugate is the (1,0) part.
  ScalarField dzG = partial_z(G, 0);
  ScalarField conj_connection =
      zip_fields(dzG, G, [](cplx d, cplx g) { return std::conj(d) / g.real(); },
                 FieldKind::Complex);
  ScalarField div = sub(partial_zbar(B, 0),
                        zip_fields(conj_connection, B,
                                   [](cplx c, cplx b) { return c * b.real(); },
                                   FieldKind::Complex));
  ScalarField s = zip_fields(div, G,
                             [](cplx d, cplx g) { return cplx(0.0, -1.0) * d / g.real(); },
                             FieldKind::Complex);
  ScalarField s_conj = map_field(s, [](cplx v) { return std::conj(v); }, FieldKind::Complex);

  // d of the mixed 1-form, repackaged with the form-i convention:
  // output component = (i/2) (dz s - dzbar conj(s)).
  ScalarField out = zip_fields(partial_z(s, 0), partial_zbar(s_conj, 0),
                               [](cplx a, cplx b) { return cplx(0.0, 0.5) * (a - b); },
                               FieldKind::Complex);
  const double kscale = kTwoPi / m.grid().period * m.grid().points_per_axis;
  ScalarField out_real = to_real_checked(
      out, (sup_norm(B) + 1.0) * (sup_norm(G) + 1.0) * kscale * kscale, "hodge laplacian");

  HermitianFormField result = zero_form(m.grid());
  for (std::size_t node = 0; node < out_real.values.size(); ++node)
    result.at(node, 0, 0) = cplx(out_real.real_at(node), 0.0);
  return result;
}

ScalarField scalar_curvature(const KahlerMetricField& m) { return trace(m, ricci(m)); }

std::pair<double, double> eigen_bounds(const KahlerMetricField& reference,
                                       const KahlerMetricField& m) {
  require_same_grid(reference.grid(), m.grid(), "eigen_bounds");
  const int n = m.grid().n;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t node = 0; node < m.grid().total_nodes(); ++node) {
    if (n == 1) {
      const double mu = m.g.at(node, 0, 0).real() / reference.g.at(node, 0, 0).real();
      lo = std::min(lo, mu);
      hi = std::max(hi, mu);
    } else {
      // Roots of det(A - mu B) = 0 for the Hermitian pair (A, B), B > 0.
      const double a11 = m.g.at(node, 0, 0).real();
      const double a22 = m.g.at(node, 1, 1).real();
      const cplx a12 = m.g.at(node, 0, 1);
      const double b11 = reference.g.at(node, 0, 0).real();
      const double b22 = reference.g.at(node, 1, 1).real();
      const cplx b12 = reference.g.at(node, 0, 1);
      const double qa = reference.det[node];
      const double qb = a11 * b22 + a22 * b11 - 2.0 * (a12 * std::conj(b12)).real();
      const double qc = m.det[node];
      const double disc = std::max(qb * qb - 4.0 * qa * qc, 0.0);
      const double root = std::sqrt(disc);
      lo = std::min(lo, (qb - root) / (2.0 * qa));
      hi = std::max(hi, (qb + root) / (2.0 * qa));
    }
  }
  return {lo, hi};
}

double form_sup_vs(const KahlerMetricField& reference, const HermitianFormField& form) {
  require_same_grid(reference.grid(), form.grid, "form_sup_vs");
  const int n = form.grid.n;
  double sup = 0.0;
  for (std::size_t node = 0; node < form.grid.total_nodes(); ++node) {
    if (n == 1) {
      sup = std::max(sup,
                     std::abs(form.at(node, 0, 0).real()) / reference.g.at(node, 0, 0).real());
    } else {
      const double a11 = form.at(node, 0, 0).real();
      const double a22 = form.at(node, 1, 1).real();
      const cplx a12 = form.at(node, 0, 1);
      const double b11 = reference.g.at(node, 0, 0).real();
      const double b22 = reference.g.at(node, 1, 1).real();
      const cplx b12 = reference.g.at(node, 0, 1);
      const double qa = reference.det[node];
      const double qb = a11 * b22 + a22 * b11 - 2.0 * (a12 * std::conj(b12)).real();
      const double qc = a11 * a22 - std::norm(a12);
      const double root = std::sqrt(std::max(qb * qb - 4.0 * qa * qc, 0.0));
      sup = std::max({sup, std::abs((qb - root) / (2.0 * qa)), std::abs((qb + root) / (2.0 * qa))});
    }
  }
  return sup;
}

ScalarField det_field(const KahlerMetricField& m) {
  ScalarField out = make_field(m.grid(), FieldKind::Real);
  for (std::size_t node = 0; node < out.values.size(); ++node)
    out.values[node] = cplx(m.det[node], 0.0);
  return out;
}

double volume(const KahlerMetricField& m) { return integrate(det_field(m)); }

double volume_integral(const KahlerMetricField& m, const ScalarField& f) {
  if (f.kind != FieldKind::Real) throw Error("volume_integral: field must be real");
  require_same_grid(m.grid(), f.grid, "volume_integral");
  ScalarField weighted = make_field(m.grid(), FieldKind::Real);
  for (std::size_t node = 0; node < weighted.values.size(); ++node)
    weighted.values[node] = cplx(f.real_at(node) * m.det[node], 0.0);
  return integrate(weighted);
}

double volume_mean(const KahlerMetricField& m, const ScalarField& f) {
  return volume_integral(m, f) / volume(m);
}

}  // namespace contlab
