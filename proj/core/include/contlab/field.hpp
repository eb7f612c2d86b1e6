#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "contlab/grid.hpp"

namespace contlab {

using cplx = std::complex<double>;

enum class FieldKind { Real, Complex };

/// One scalar value per grid node. Real-kind fields still use complex storage
/// (the spectral engine works in C); their imaginary parts are exact zeros
/// outside of transform round-off, which is policed at enforcement points.
struct ScalarField {
  GridSpec grid;
  FieldKind kind = FieldKind::Real;
  std::vector<cplx> values;

  double real_at(std::size_t i) const { return values[i].real(); }
};

ScalarField make_field(const GridSpec& g, FieldKind kind = FieldKind::Real);
ScalarField constant_field(const GridSpec& g, double value);

/// Samples fn(coords) over the grid; coords follow the (x1,y1[,x2,y2]) order.
ScalarField sample_real(const GridSpec& g,
                        const std::function<double(const std::array<double, kMaxAxes>&)>& fn);
ScalarField sample_complex(const GridSpec& g,
                           const std::function<cplx(const std::array<double, kMaxAxes>&)>& fn);

double sup_norm(const ScalarField& f);
/// Plain arithmetic mean over nodes (pairwise summation, fixed order).
double mean(const ScalarField& f);
/// Trapezoidal-exact periodic quadrature: mean(values) * period^(2n).
/// Requires a real field.
double integrate(const ScalarField& f);

void check_finite(const ScalarField& f, const char* what);

/// Declares the field real after checking sup|Im| <= 1e-12 * scale_hint.
/// scale_hint should be the sup of whatever entered the producing transform.
ScalarField to_real_checked(ScalarField f, double scale_hint, const char* what);

/// Bridges to plain real vectors for the linear-algebra layer.
std::vector<double> to_vector(const ScalarField& f);
ScalarField from_vector(const GridSpec& g, const std::vector<double>& v);

ScalarField add(const ScalarField& a, const ScalarField& b);
ScalarField sub(const ScalarField& a, const ScalarField& b);
ScalarField scaled(const ScalarField& a, double c);
ScalarField shifted(const ScalarField& a, double c);

template <class F>
ScalarField map_field(const ScalarField& a, F&& fn, FieldKind kind = FieldKind::Real) {
  ScalarField out;
  out.grid = a.grid;
  out.kind = kind;
  out.values.resize(a.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) out.values[i] = fn(a.values[i]);
  return out;
}

template <class F>
ScalarField zip_fields(const ScalarField& a, const ScalarField& b, F&& fn,
                       FieldKind kind = FieldKind::Real) {
  require_same_grid(a.grid, b.grid, "zip_fields");
  ScalarField out;
  out.grid = a.grid;
  out.kind = kind;
  out.values.resize(a.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) out.values[i] = fn(a.values[i], b.values[i]);
  return out;
}

namespace detail {
/// Deterministic pairwise sum of a real sequence accessed through get(i).
double pairwise_sum(std::size_t begin, std::size_t end,
                    const std::function<double(std::size_t)>& get);
}  // namespace detail

}  // namespace contlab
