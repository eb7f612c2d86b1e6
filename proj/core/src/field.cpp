#include "contlab/field.hpp"

#include <algorithm>
#include <cmath>

namespace contlab {

namespace detail {

double pairwise_sum(std::size_t begin, std::size_t end,
                    const std::function<double(std::size_t)>& get) {
  const std::size_t count = end - begin;
  if (count <= 8) {
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += get(i);
    return s;
  }
  const std::size_t mid = begin + count / 2;
  return pairwise_sum(begin, mid, get) + pairwise_sum(mid, end, get);
}

}  // namespace detail

ScalarField make_field(const GridSpec& g, FieldKind kind) {
  g.validate();
  ScalarField f;
  f.grid = g;
  f.kind = kind;
  f.values.assign(g.total_nodes(), cplx(0.0, 0.0));
  return f;
}

ScalarField constant_field(const GridSpec& g, double value) {
  ScalarField f = make_field(g, FieldKind::Real);
  std::fill(f.values.begin(), f.values.end(), cplx(value, 0.0));
  return f;
}

ScalarField sample_real(const GridSpec& g,
                        const std::function<double(const std::array<double, kMaxAxes>&)>& fn) {
  ScalarField f = make_field(g, FieldKind::Real);
  for_each_node_indexed(g, [&](std::size_t idx, const std::array<int, kMaxAxes>& c) {
    f.values[idx] = cplx(fn(node_coords(g, c)), 0.0);
  });
  return f;
}

ScalarField sample_complex(const GridSpec& g,
                           const std::function<cplx(const std::array<double, kMaxAxes>&)>& fn) {
  ScalarField f = make_field(g, FieldKind::Complex);
  for_each_node_indexed(g, [&](std::size_t idx, const std::array<int, kMaxAxes>& c) {
    f.values[idx] = fn(node_coords(g, c));
  });
  return f;
}

double sup_norm(const ScalarField& f) {
  double m = 0.0;
  for (const cplx& v : f.values) m = std::max(m, std::abs(v));
  return m;
}

double mean(const ScalarField& f) {
  if (f.kind != FieldKind::Real) throw Error("mean: field must be real");
  const double s = detail::pairwise_sum(0, f.values.size(),
                                        [&](std::size_t i) { return f.values[i].real(); });
  return s / static_cast<double>(f.values.size());
}

double integrate(const ScalarField& f) {
  if (f.kind != FieldKind::Real) throw Error("integrate: density must be real");
  double cell = 1.0;
  for (int a = 0; a < f.grid.axes(); ++a) cell *= f.grid.period;
  return mean(f) * cell;
}

void check_finite(const ScalarField& f, const char* what) {
  for (const cplx& v : f.values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw NonFiniteField(std::string(what) + ": non-finite value in field");
}

ScalarField to_real_checked(ScalarField f, double scale_hint, const char* what) {
  double im = 0.0;
  for (const cplx& v : f.values) im = std::max(im, std::abs(v.imag()));
  const double tol = 1e-12 * std::max(scale_hint, 1e-300);
  if (im > tol)
    throw Error(std::string(what) + ": imaginary residual " + std::to_string(im) +
                " exceeds 1e-12 * " + std::to_string(scale_hint));
  for (cplx& v : f.values) v = cplx(v.real(), 0.0);
  f.kind = FieldKind::Real;
  return f;
}

std::vector<double> to_vector(const ScalarField& f) {
  if (f.kind != FieldKind::Real) throw Error("to_vector: field must be real");
  std::vector<double> v(f.values.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f.values[i].real();
  return v;
}

ScalarField from_vector(const GridSpec& g, const std::vector<double>& v) {
  if (v.size() != g.total_nodes()) throw Error("from_vector: size mismatch");
  ScalarField f = make_field(g, FieldKind::Real);
  for (std::size_t i = 0; i < v.size(); ++i) f.values[i] = cplx(v[i], 0.0);
  return f;
}

ScalarField add(const ScalarField& a, const ScalarField& b) {
  FieldKind k = (a.kind == FieldKind::Real && b.kind == FieldKind::Real) ? FieldKind::Real
                                                                         : FieldKind::Complex;
  return zip_fields(a, b, [](cplx x, cplx y) { return x + y; }, k);
}

ScalarField sub(const ScalarField& a, const ScalarField& b) {
  FieldKind k = (a.kind == FieldKind::Real && b.kind == FieldKind::Real) ? FieldKind::Real
                                                                         : FieldKind::Complex;
  return zip_fields(a, b, [](cplx x, cplx y) { return x - y; }, k);
}

ScalarField scaled(const ScalarField& a, double c) {
  return map_field(a, [c](cplx x) { return c * x; }, a.kind);
}

ScalarField shifted(const ScalarField& a, double c) {
  return map_field(a, [c](cplx x) { return x + c; }, a.kind);
}

}  // namespace contlab
