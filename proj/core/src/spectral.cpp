#include "contlab/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "contlab/errors.hpp"

namespace contlab {

namespace {

// Plans are cached for the life of the process and shared across threads.
// FFTW_UNALIGNED keeps them valid for any heap buffer, FFTW_ESTIMATE keeps
// planning deterministic and leaves the planning buffers untouched.
fftw_plan plan_for(int axes, int points, int sign) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(mu);
  const auto key = std::make_tuple(axes, points, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  std::size_t total = 1;
  for (int a = 0; a < axes; ++a) total *= static_cast<std::size_t>(points);
  std::vector<int> dims(static_cast<std::size_t>(axes), points);
  fftw_complex* in = fftw_alloc_complex(total);
  fftw_complex* out = fftw_alloc_complex(total);
  if (in == nullptr || out == nullptr) {
    fftw_free(in);
    fftw_free(out);
    throw GridTooLarge("spectral transform buffers");
  }
  fftw_plan plan =
      fftw_plan_dft(axes, dims.data(), in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(in);
  fftw_free(out);
  if (plan == nullptr) throw Error("spectral transform planning failed");
  cache.emplace(key, plan);
  return plan;
}

fftw_complex* as_fftw(std::vector<cplx>& v) { return reinterpret_cast<fftw_complex*>(v.data()); }

void run_plan(const GridSpec& g, int sign, std::vector<cplx>& in, std::vector<cplx>& out) {
  fftw_execute_dft(plan_for(g.axes(), g.points_per_axis, sign), as_fftw(in), as_fftw(out));
}

// Applies a diagonal operator in mode space: out_hat(k) = symbol(k) * in_hat(k).
// The symbol callback receives the signed per-axis wavenumbers of the mode.
template <class Symbol>
std::vector<cplx> apply_symbol(const GridSpec& g, const std::vector<cplx>& values,
                               Symbol&& symbol) {
  if (values.size() != g.total_nodes()) throw Error("spectral input does not match grid");
  const std::vector<double> kd = wavenumbers(g);
  const int axes = g.axes();
  const int N = g.points_per_axis;

  std::vector<cplx> work(values);
  {
    // When the operator annihilates constants, removing the mean before the
    // transform is exact and keeps a large offset (the potential means grow
    // with the continuity parameter) from bleeding into high modes through
    // transform roundoff, where the symbol would amplify it by k^2.
    std::array<double, kMaxAxes> zerok{};
    if (cplx(symbol(zerok)) == cplx(0.0, 0.0)) {
      cplx mean(0.0, 0.0);
      for (const cplx& c : work) mean += c;
      mean /= static_cast<double>(work.size());
      for (cplx& c : work) c -= mean;
    }
  }
  std::vector<cplx> hat(values.size());
  run_plan(g, FFTW_FORWARD, work, hat);

  std::array<int, kMaxAxes> idx{};
  std::array<double, kMaxAxes> k{};
  for (int a = 0; a < axes; ++a) k[a] = kd[0];
  for (std::size_t node = 0; node < hat.size(); ++node) {
    hat[node] *= symbol(k);
    int a = axes - 1;
    while (a >= 0) {
      if (++idx[a] < N) {
        k[a] = kd[static_cast<std::size_t>(idx[a])];
        break;
      }
      idx[a] = 0;
      k[a] = kd[0];
      --a;
    }
  }

  run_plan(g, FFTW_BACKWARD, hat, work);
  const double inv_total = 1.0 / static_cast<double>(g.total_nodes());
  for (cplx& c : work) c *= inv_total;
  return work;
}

ScalarField complex_result(const GridSpec& g, std::vector<cplx> values) {
  ScalarField out;
  out.grid = g;
  out.kind = FieldKind::Complex;
  out.values = std::move(values);
  check_finite(out, "spectral result");
  return out;
}

// Wraps values whose imaginary part must be transform roundoff. The hint is
// an upper bound for the honest magnitude of the operation (input size times
// operator scale), so identically vanishing results do not trip the check.
ScalarField real_result(const GridSpec& g, std::vector<cplx> values, double hint,
                        const char* what) {
  ScalarField out = complex_result(g, std::move(values));
  return to_real_checked(out, hint, what);
}

double max_wavenumber(const GridSpec& g) {
  double m = 0.0;
  for (double k : wavenumbers(g)) m = std::max(m, std::abs(k));
  return m;
}

void require_axis(const ScalarField& f, int j) {
  if (j < 0 || j >= f.grid.n) throw Error("complex direction index out of range");
}

}  // namespace

std::vector<cplx> dft_forward(const GridSpec& g, const std::vector<cplx>& values) {
  g.validate();
  if (values.size() != g.total_nodes()) throw Error("spectral input does not match grid");
  std::vector<cplx> in(values);
  std::vector<cplx> out(values.size());
  run_plan(g, FFTW_FORWARD, in, out);
  return out;
}

std::vector<cplx> dft_inverse(const GridSpec& g, std::vector<cplx> coeffs) {
  g.validate();
  if (coeffs.size() != g.total_nodes()) throw Error("spectral input does not match grid");
  std::vector<cplx> out(coeffs.size());
  run_plan(g, FFTW_BACKWARD, coeffs, out);
  const double inv_total = 1.0 / static_cast<double>(g.total_nodes());
  for (cplx& c : out) c *= inv_total;
  return out;
}

std::vector<double> wavenumbers(const GridSpec& g) {
  g.validate();
  const int N = g.points_per_axis;
  const double unit = kTwoPi / g.period;
  std::vector<double> kd(static_cast<std::size_t>(N), 0.0);
  for (int m = 0; m < N; ++m) {
    int folded = m <= N / 2 ? m : m - N;
    if (m == N / 2) folded = 0;
    kd[static_cast<std::size_t>(m)] = unit * folded;
  }
  return kd;
}

ScalarField partial_axis(const ScalarField& f, int axis) {
  if (axis < 0 || axis >= f.grid.axes()) throw Error("axis out of range");
  auto vals = apply_symbol(f.grid, f.values,
                           [axis](const std::array<double, kMaxAxes>& k) {
                             return cplx(0.0, k[static_cast<std::size_t>(axis)]);
                           });
  if (f.kind == FieldKind::Complex) return complex_result(f.grid, std::move(vals));
  return real_result(f.grid, std::move(vals), sup_norm(f) * max_wavenumber(f.grid),
                     "axis derivative");
}

ScalarField partial_z(const ScalarField& f, int j) {
  require_axis(f, j);
  const std::size_t ax = static_cast<std::size_t>(2 * j);
  const std::size_t ay = ax + 1;
  return complex_result(f.grid, apply_symbol(f.grid, f.values,
                                             [ax, ay](const std::array<double, kMaxAxes>& k) {
                                               return cplx(0.5 * k[ay], 0.5 * k[ax]);
                                             }));
}

ScalarField partial_zbar(const ScalarField& f, int j) {
  require_axis(f, j);
  const std::size_t ax = static_cast<std::size_t>(2 * j);
  const std::size_t ay = ax + 1;
  return complex_result(f.grid, apply_symbol(f.grid, f.values,
                                             [ax, ay](const std::array<double, kMaxAxes>& k) {
                                               return cplx(-0.5 * k[ay], 0.5 * k[ax]);
                                             }));
}

HermitianFormField complex_hessian(const ScalarField& f) {
  if (f.kind != FieldKind::Real) throw Error("complex_hessian expects a real field");
  const GridSpec& g = f.grid;
  const int n = g.n;
  HermitianFormField h = zero_form(g);
  const double kmax = max_wavenumber(g);
  const double imag_tol = 1e-12 * std::max(sup_norm(f) * kmax * kmax, 1e-300);

  for (int j = 0; j < n; ++j) {
    for (int k = j; k < n; ++k) {
      const std::size_t jx = static_cast<std::size_t>(2 * j), jy = jx + 1;
      const std::size_t kx = static_cast<std::size_t>(2 * k), ky = kx + 1;
      auto vals = apply_symbol(g, f.values, [=](const std::array<double, kMaxAxes>& w) {
        const cplx wj(0.5 * w[jy], 0.5 * w[jx]);
        const cplx vk(-0.5 * w[ky], 0.5 * w[kx]);
        return wj * vk;
      });
      if (j == k) {
        for (std::size_t node = 0; node < vals.size(); ++node) {
          if (std::abs(vals[node].imag()) > imag_tol)
            throw Error("complex_hessian: diagonal drifted off the real axis");
          h.at(node, j, j) = cplx(vals[node].real(), 0.0);
        }
      } else {
        for (std::size_t node = 0; node < vals.size(); ++node) {
          h.at(node, j, k) = vals[node];
          h.at(node, k, j) = std::conj(vals[node]);
        }
      }
    }
  }
  check_finite(h, "complex hessian");
  return h;
}

ScalarField flat_laplacian(const ScalarField& f) {
  const GridSpec& g = f.grid;
  auto vals = apply_symbol(g, f.values, [&g](const std::array<double, kMaxAxes>& k) {
    double s = 0.0;
    for (int a = 0; a < g.axes(); ++a) s += k[static_cast<std::size_t>(a)] * k[static_cast<std::size_t>(a)];
    return cplx(-0.25 * s, 0.0);
  });
  if (f.kind == FieldKind::Complex) return complex_result(g, std::move(vals));
  const double kmax = max_wavenumber(g);
  return real_result(g, std::move(vals), sup_norm(f) * 0.5 * g.axes() * kmax * kmax,
                     "flat laplacian");
}

ScalarField solve_flat_helmholtz(const ScalarField& rhs, double c0, double c1) {
  if (c0 < 0.0 || c1 < 0.0 || (c0 == 0.0 && c1 == 0.0))
    throw Error("solve_flat_helmholtz: need c0 >= 0, c1 >= 0, not both zero");
  const GridSpec& g = rhs.grid;
  auto vals = apply_symbol(g, rhs.values, [&g, c0, c1](const std::array<double, kMaxAxes>& k) {
    double s = 0.0;
    for (int a = 0; a < g.axes(); ++a) s += k[static_cast<std::size_t>(a)] * k[static_cast<std::size_t>(a)];
    const double divisor = c0 + c1 * 0.25 * s;
    return divisor == 0.0 ? cplx(0.0, 0.0) : cplx(1.0 / divisor, 0.0);
  });
  if (rhs.kind == FieldKind::Complex) return complex_result(g, std::move(vals));
  const double kmin = kTwoPi / g.period;
  const double dmin = c0 > 0.0 ? c0 : c1 * 0.25 * kmin * kmin;
  return real_result(g, std::move(vals), sup_norm(rhs) / dmin, "helmholtz solve");
}

ScalarField solve_constant_helmholtz(const ScalarField& rhs,
                                     const std::vector<cplx>& inverse_metric, double c0,
                                     double c1) {
  if (c0 < 0.0 || c1 < 0.0 || (c0 == 0.0 && c1 == 0.0))
    throw Error("solve_constant_helmholtz: need c0 >= 0, c1 >= 0, not both zero");
  const GridSpec& g = rhs.grid;
  const int n = g.n;
  if (inverse_metric.size() != static_cast<std::size_t>(n) * n)
    throw Error("solve_constant_helmholtz: inverse metric size mismatch");
  double floor_eig = inverse_metric[0].real();
  if (n == 2) {
    const double a = inverse_metric[0].real(), c = inverse_metric[3].real();
    const double half_gap = std::sqrt(0.25 * (a - c) * (a - c) + std::norm(inverse_metric[1]));
    floor_eig = 0.5 * (a + c) - half_gap;
  }
  if (!(floor_eig > 0.0))
    throw Error("solve_constant_helmholtz: inverse metric must be positive definite");

  auto vals = apply_symbol(g, rhs.values, [&](const std::array<double, kMaxAxes>& k) {
    // L-symbol: sum_{j,l} inv[j][l] * w_l * v_j, analytically real and <= 0.
    cplx sym(0.0, 0.0);
    for (int j = 0; j < n; ++j) {
      const cplx vj(-0.5 * k[static_cast<std::size_t>(2 * j + 1)],
                    0.5 * k[static_cast<std::size_t>(2 * j)]);
      for (int l = 0; l < n; ++l) {
        const cplx wl(0.5 * k[static_cast<std::size_t>(2 * l + 1)],
                      0.5 * k[static_cast<std::size_t>(2 * l)]);
        sym += inverse_metric[static_cast<std::size_t>(j) * n + l] * wl * vj;
      }
    }
    const double divisor = c0 - c1 * sym.real();
    return divisor == 0.0 ? cplx(0.0, 0.0) : cplx(1.0 / divisor, 0.0);
  });
  if (rhs.kind == FieldKind::Complex) return complex_result(g, std::move(vals));
  const double kmin = kTwoPi / g.period;
  const double dmin = c0 > 0.0 ? c0 : c1 * floor_eig * 0.25 * kmin * kmin;
  return real_result(g, std::move(vals), sup_norm(rhs) / dmin, "helmholtz solve");
}

}  // namespace contlab
