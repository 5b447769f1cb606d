#include "scalekit/nls.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace scalekit::nls {

namespace {

double rss_of(const std::vector<double>& r) {
  double s = 0.0;
  for (double v : r) s += v * v;
  return s;
}

// Gaussian elimination with partial pivoting on the (n x n) system
// a * x = b; a and b are overwritten. Returns false when singular.
bool solve_dense(std::vector<double>& a, std::vector<double>& b, int n) {
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int row = col + 1; row < n; ++row) {
      if (std::fabs(a[row * n + col]) > std::fabs(a[pivot * n + col])) pivot = row;
    }
    if (a[pivot * n + col] == 0.0) return false;
    if (pivot != col) {
      for (int k = 0; k < n; ++k) std::swap(a[col * n + k], a[pivot * n + k]);
      std::swap(b[col], b[pivot]);
    }
    double d = a[col * n + col];
    for (int row = col + 1; row < n; ++row) {
      double factor = a[row * n + col] / d;
      if (factor == 0.0) continue;
      for (int k = col; k < n; ++k) a[row * n + k] -= factor * a[col * n + k];
      b[row] -= factor * b[col];
    }
  }
  for (int row = n - 1; row >= 0; --row) {
    double acc = b[row];
    for (int k = row + 1; k < n; ++k) acc -= a[row * n + k] * b[k];
    b[row] = acc / a[row * n + row];
  }
  return true;
}

}  // namespace

Result solve(const ResidualFn& fn, std::vector<double> theta0, int m,
             const Options& opts) {
  const int n = static_cast<int>(theta0.size());
  if (n < 1 || n > 8) throw std::invalid_argument("nls::solve supports 1..8 parameters");
  if (m < n) throw std::invalid_argument("nls::solve needs at least as many residuals as parameters");

  std::vector<double> r(m), jac(static_cast<std::size_t>(m) * n);
  Result out;
  out.theta = std::move(theta0);
  if (!fn(out.theta.data(), r.data(), jac.data())) {
    throw std::invalid_argument("nls::solve: infeasible starting point");
  }
  out.rss = rss_of(r);

  double damping = opts.initial_damping;
  std::vector<double> jtj(static_cast<std::size_t>(n) * n), jtr(n);
  std::vector<double> a, step, trial(n), trial_r(m);

  for (out.iterations = 0; out.iterations < opts.max_iterations; ++out.iterations) {
    for (int i = 0; i < n; ++i) {
      jtr[i] = 0.0;
      for (int j = 0; j < n; ++j) jtj[i * n + j] = 0.0;
    }
    for (int row = 0; row < m; ++row) {
      const double* jrow = &jac[static_cast<std::size_t>(row) * n];
      for (int i = 0; i < n; ++i) {
        jtr[i] += jrow[i] * r[row];
        for (int j = i; j < n; ++j) jtj[i * n + j] += jrow[i] * jrow[j];
      }
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < i; ++j) jtj[i * n + j] = jtj[j * n + i];
    }

    bool accepted = false;
    for (int attempt = 0; attempt < 40 && !accepted; ++attempt) {
      a = jtj;
      for (int i = 0; i < n; ++i) {
        a[i * n + i] += damping * (jtj[i * n + i] > 0.0 ? jtj[i * n + i] : 1.0);
      }
      step = jtr;
      if (!solve_dense(a, step, n)) {
        damping *= 10.0;
        continue;
      }
      for (int i = 0; i < n; ++i) trial[i] = out.theta[i] - step[i];
      if (!fn(trial.data(), trial_r.data(), nullptr)) {
        damping *= 10.0;
        continue;
      }
      double trial_rss = rss_of(trial_r);
      if (std::isfinite(trial_rss) && trial_rss <= out.rss) {
        double denom = out.rss > 0.0 ? out.rss : 1.0;
        double rel_drop = (out.rss - trial_rss) / denom;
        out.theta = trial;
        out.rss = trial_rss;
        damping = std::max(damping / 3.0, 1e-14);
        accepted = true;
        if (rel_drop < opts.rel_rss_tol) {
          out.converged = true;
          return out;
        }
      } else {
        damping *= 10.0;
      }
    }
    if (!accepted) {
      // Damping exhausted: no descent direction improves; treat the
      // current point as the solution.
      out.converged = true;
      return out;
    }
    fn(out.theta.data(), r.data(), jac.data());
  }
  return out;
}

}  // namespace scalekit::nls
