#pragma once

#include <functional>
#include <vector>

namespace scalekit::nls {

/// Fills r (size m) and, when jac is non-null, the row-major m x n
/// Jacobian, both evaluated at theta (size n). Returns false if theta is
/// outside the feasible region, in which case the solver rejects the
/// step instead of evaluating.
using ResidualFn =
    std::function<bool(const double* theta, double* r, double* jac)>;

struct Options {
  int max_iterations = 200;
  double rel_rss_tol = 1e-10;
  double initial_damping = 1e-3;
};

struct Result {
  std::vector<double> theta;
  double rss = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Damped Gauss-Newton over a handful of parameters. Deterministic:
/// no randomness, fixed damping schedule, fixed evaluation order.
/// Intended for the 2-4 parameter fits in this toolkit; n must be <= 8.
Result solve(const ResidualFn& fn, std::vector<double> theta0, int m,
             const Options& opts = {});

}  // namespace scalekit::nls
