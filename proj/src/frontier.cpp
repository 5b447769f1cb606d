#include "scalekit/frontier.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "scalekit/arch.hpp"
#include "scalekit/errors.hpp"
#include "scalekit/text.hpp"

namespace scalekit::frontier {

namespace {

void require_positive(double v, const char* name) {
  if (!std::isfinite(v) || v <= 0.0) {
    throw std::invalid_argument(std::string(name) + " must be finite and > 0");
  }
}

// Compute scale of the derived frontier in FLOPs:
// 6 N_c B_* S_c (1 + r)^(1/alpha_S + 1/alpha_N) (1/r)^(1/alpha_S),
// r = alpha_N / alpha_S.
double derived_cc_flops(double alpha_n, double alpha_s, double n_c, double s_c,
                        double b_star) {
  double r = alpha_n / alpha_s;
  return 6.0 * n_c * b_star * s_c *
         std::pow(1.0 + r, 1.0 / alpha_s + 1.0 / alpha_n) *
         std::pow(1.0 / r, 1.0 / alpha_s);
}

Allocation derived_allocation(double c_min_pf_days, double alpha_n, double alpha_s,
                              double n_c, double s_c, const laws::ScalingConstants& k) {
  require_positive(c_min_pf_days, "c_min_pf_days");
  double c_flops = c_min_pf_days * arch::kFlopsPerPfDay;
  double alpha_c = 1.0 / (1.0 / alpha_s + 1.0 / k.alpha_B + 1.0 / alpha_n);
  double cc = derived_cc_flops(alpha_n, alpha_s, n_c, s_c, k.B_star);
  double r = alpha_n / alpha_s;

  Allocation a;
  a.c_min = c_min_pf_days;
  a.predicted_loss = std::pow(cc / c_flops, alpha_c);
  a.n_opt = n_c * std::pow(c_flops / cc, alpha_c / alpha_n) * std::pow(1.0 + r, 1.0 / alpha_n);
  a.b = laws::critical_batch(a.predicted_loss, k);
  a.s_min = 2.0 * c_flops / (6.0 * a.n_opt * a.b);
  a.d_processed = a.b * a.s_min;
  return a;
}

}  // namespace

void EmpiricalTrends::validate() const {
  require_positive(p_n, "p_n");
  require_positive(n_e, "n_e");
  require_positive(p_b, "p_b");
  require_positive(b_e, "b_e");
  require_positive(p_s, "p_s");
  require_positive(s_e, "s_e");
  require_positive(p_d, "p_d");
  require_positive(d_e, "d_e");
}

const EmpiricalTrends& EmpiricalTrends::appendix_a() {
  static const EmpiricalTrends t = [] {
    EmpiricalTrends e;
    e.p_n = 0.73;
    e.n_e = 1.3e9;
    e.p_b = 0.24;
    e.b_e = 2.0e6;
    e.p_s = 0.03;
    e.s_e = 5.4e3;
    e.p_d = 0.27;
    e.d_e = 2e10;
    e.validate();
    return e;
  }();
  return t;
}

AllocationExponents derived_exponents(const laws::ScalingConstants& k) {
  k.validate();
  AllocationExponents e;
  e.alpha_c = 1.0 / (1.0 / k.alpha_S + 1.0 / k.alpha_B + 1.0 / k.alpha_N);
  e.p_n = e.alpha_c / k.alpha_N;
  e.p_b = e.alpha_c / k.alpha_B;
  e.p_s = e.alpha_c / k.alpha_S;
  e.p_d = e.p_b + e.p_s;
  return e;
}

AllocationExponents empirical_exponents(const EmpiricalTrends& t,
                                        const laws::ScalingConstants& k) {
  t.validate();
  k.validate();
  AllocationExponents e;
  e.alpha_c = k.alpha_C_min;
  e.p_n = t.p_n;
  e.p_b = t.p_b;
  e.p_s = t.p_s;
  e.p_d = t.p_d;
  return e;
}

Allocation optimal_allocation(double c_min_pf_days, const laws::ScalingConstants& k,
                              Mode mode) {
  k.validate();
  if (mode == Mode::derived) {
    return derived_allocation(c_min_pf_days, k.alpha_N, k.alpha_S, k.N_c, k.S_c, k);
  }
  require_positive(c_min_pf_days, "c_min_pf_days");
  const EmpiricalTrends& t = EmpiricalTrends::appendix_a();
  double c_flops = c_min_pf_days * arch::kFlopsPerPfDay;
  Allocation a;
  a.c_min = c_min_pf_days;
  a.n_opt = t.n_e * std::pow(c_min_pf_days, t.p_n);
  a.predicted_loss = laws::loss_of_cmin(c_min_pf_days, k);
  a.b = laws::critical_batch(a.predicted_loss, k);
  a.s_min = 2.0 * c_flops / (6.0 * a.n_opt * a.b);
  a.d_processed = a.b * a.s_min;
  return a;
}

Allocation optimal_allocation(double c_min_pf_days, const laws::ScalingConstants& k,
                              const laws::LossNSConstants& surface) {
  k.validate();
  surface.validate();
  return derived_allocation(c_min_pf_days, surface.alpha_N, surface.alpha_S,
                            surface.N_c, surface.S_c, k);
}

double derived_compute_scale(const laws::ScalingConstants& k) {
  k.validate();
  return derived_cc_flops(k.alpha_N, k.alpha_S, k.N_c, k.S_c, k.B_star) /
         arch::kFlopsPerPfDay;
}

EfficiencyRatios efficient_vs_converged(double f, double f_prime,
                                        const laws::ScalingConstants& k) {
  require_positive(f, "f");
  require_positive(f_prime, "f_prime");
  EfficiencyRatios r;
  r.n_ratio = std::pow((1.0 + f) / (1.0 + f_prime), 1.0 / k.alpha_N);
  r.s_ratio = std::pow((1.0 + 1.0 / f) / (1.0 + 1.0 / f_prime), 1.0 / k.alpha_S);
  r.c_ratio = r.n_ratio * r.s_ratio;
  return r;
}

double min_feasible_size_ratio(const laws::ScalingConstants& k) {
  return std::pow(1.0 + k.alpha_N / k.alpha_S, -1.0 / k.alpha_N);
}

SuboptimalOverhead suboptimal_overhead(double ratio, const laws::ScalingConstants& k) {
  require_positive(ratio, "ratio");
  double bracket = 1.0 + (k.alpha_S / k.alpha_N) * (1.0 - std::pow(ratio, -k.alpha_N));
  if (bracket <= 0.0) {
    throw InfeasibleSizeRatio(
        "model size ratio too small to ever reach the target loss",
        min_feasible_size_ratio(k));
  }
  SuboptimalOverhead o;
  o.step_ratio = std::pow(bracket, -1.0 / k.alpha_S);
  o.compute_overhead = ratio * o.step_ratio;
  return o;
}

double data_trajectory(double c_min_pf_days, const laws::ScalingConstants& k,
                       const EmpiricalTrends& t) {
  require_positive(c_min_pf_days, "c_min_pf_days");
  k.validate();
  t.validate();
  double c_flops = c_min_pf_days * arch::kFlopsPerPfDay;
  double n = t.n_e * std::pow(c_min_pf_days, t.p_n);
  return 2.0 * c_flops / (6.0 * n);
}

double overfit_data_trajectory(double c_min_pf_days, double delta,
                               const laws::LossNDConstants& j,
                               const EmpiricalTrends& t) {
  require_positive(c_min_pf_days, "c_min_pf_days");
  double n = t.n_e * std::pow(c_min_pf_days, t.p_n);
  return laws::data_requirement(n, delta, j);
}

std::optional<Intersection> intersection_point(const laws::ScalingConstants& k,
                                               const EmpiricalTrends& t) {
  k.validate();
  t.validate();
  // One-epoch trajectory D(C) = A * C^q against the frontier loss: both
  // sides of L(D(C)) = L(C_min) are power laws in C, so the crossing is
  // a ratio of logs.
  double a = 2.0 * arch::kFlopsPerPfDay / (6.0 * t.n_e);
  double q = 1.0 - t.p_n;
  double denom = k.alpha_C_min - k.alpha_D * q;
  double scale = std::max(k.alpha_C_min, std::fabs(k.alpha_D * q));
  if (std::fabs(denom) < 1e-12 * scale) {
    return std::nullopt;
  }
  double ln_c = (k.alpha_C_min * std::log(k.C_c_min) - k.alpha_D * std::log(k.D_c / a)) / denom;

  Intersection x;
  x.c_star = std::exp(ln_c);
  x.n_star = t.n_e * std::pow(x.c_star, t.p_n);
  x.d_star = a * std::pow(x.c_star, q);
  x.l_star = laws::loss_of_cmin(x.c_star, k);
  return x;
}

std::vector<Allocation> frontier_sweep(const std::vector<double>& budgets_pf_days,
                                       const laws::ScalingConstants& k, Mode mode) {
  std::vector<Allocation> out;
  out.reserve(budgets_pf_days.size());
  for (double c : budgets_pf_days) {
    out.push_back(optimal_allocation(c, k, mode));
  }
  return out;
}

void sweep_to_csv(const std::vector<Allocation>& sweep, std::ostream& out) {
  out << "c_min,n_opt,b,s_min,d,loss\n";
  for (const auto& a : sweep) {
    out << text::format_double(a.c_min) << ',' << text::format_double(a.n_opt) << ','
        << text::format_double(a.b) << ',' << text::format_double(a.s_min) << ','
        << text::format_double(a.d_processed) << ','
        << text::format_double(a.predicted_loss) << '\n';
  }
}

}  // namespace scalekit::frontier
