#pragma once

#include <functional>
#include <vector>

namespace contlab {

using LinearOp = std::function<std::vector<double>(const std::vector<double>&)>;

struct KrylovResult {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Preconditioned stabilized biconjugate-gradient solve of A x = b. The
/// preconditioner callback applies an approximate inverse of A. x carries the
/// initial guess in and the solution out. Deterministic by construction:
/// serial fixed-order reductions and no randomness; shadow-vector breakdowns
/// restart on the current residual.
KrylovResult bicgstab(const LinearOp& A, const LinearOp& precond, const std::vector<double>& b,
                      std::vector<double>& x, double rtol, int max_iter);

}  // namespace contlab
