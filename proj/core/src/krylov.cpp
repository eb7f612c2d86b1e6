#include "contlab/krylov.hpp"

#include <cmath>

#include "contlab/errors.hpp"

namespace contlab {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace

KrylovResult bicgstab(const LinearOp& A, const LinearOp& precond, const std::vector<double>& b,
                      std::vector<double>& x, double rtol, int max_iter) {
  const std::size_t dim = b.size();
  if (x.size() != dim) throw Error("bicgstab: guess size mismatch");

  const double bnorm = norm(b);
  KrylovResult result;
  if (bnorm == 0.0) {
    x.assign(dim, 0.0);
    result.converged = true;
    return result;
  }
  const double target = rtol * bnorm;

  std::vector<double> r = A(x);
  for (std::size_t i = 0; i < dim; ++i) r[i] = b[i] - r[i];
  std::vector<double> rhat = r;
  std::vector<double> p(dim, 0.0), v(dim, 0.0);
  double rho = 1.0, alpha = 1.0, omega = 1.0;

  double rnorm = norm(r);
  for (int it = 0; it < max_iter && rnorm > target; ++it) {
    result.iterations = it + 1;
    double rho_next = dot(rhat, r);
    if (std::abs(rho_next) < 1e-300 * bnorm * bnorm || omega == 0.0) {
      // Shadow direction collapsed; restart the recurrence on the live residual.
      rhat = r;
      rho_next = dot(r, r);
      p.assign(dim, 0.0);
      v.assign(dim, 0.0);
      rho = 1.0;
      alpha = 1.0;
      omega = 1.0;
      if (rho_next == 0.0) break;
      for (std::size_t i = 0; i < dim; ++i) p[i] = r[i];
    } else {
      const double beta = (rho_next / rho) * (alpha / omega);
      for (std::size_t i = 0; i < dim; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    }
    rho = rho_next;

    std::vector<double> phat = precond(p);
    v = A(phat);
    const double rv = dot(rhat, v);
    if (rv == 0.0) {
      omega = 0.0;  // force a restart next pass
      continue;
    }
    alpha = rho / rv;

    std::vector<double> s = r;
    for (std::size_t i = 0; i < dim; ++i) s[i] -= alpha * v[i];
    double snorm = norm(s);
    if (snorm <= target) {
      for (std::size_t i = 0; i < dim; ++i) x[i] += alpha * phat[i];
      rnorm = snorm;
      break;
    }

    std::vector<double> shat = precond(s);
    std::vector<double> tvec = A(shat);
    const double tt = dot(tvec, tvec);
    if (tt == 0.0) {
      for (std::size_t i = 0; i < dim; ++i) x[i] += alpha * phat[i];
      r = s;
      rnorm = snorm;
      omega = 0.0;
      continue;
    }
    omega = dot(tvec, s) / tt;
    for (std::size_t i = 0; i < dim; ++i) x[i] += alpha * phat[i] + omega * shat[i];
    for (std::size_t i = 0; i < dim; ++i) r[i] = s[i] - omega * tvec[i];
    rnorm = norm(r);
  }

  result.relative_residual = rnorm / bnorm;
  result.converged = rnorm <= target;
  return result;
}

}  // namespace contlab
