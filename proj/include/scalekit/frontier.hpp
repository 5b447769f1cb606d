#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "scalekit/laws.hpp"

namespace scalekit::frontier {

/// How to extrapolate the compute-efficient frontier. `derived` uses the
/// closed forms obtained from the learning-curve surface and the
/// critical-batch law; `empirical` uses the directly measured
/// compute-trend fits. The two differ by a few percent; derived is the
/// default.
enum class Mode { derived, empirical };

/// Power-law trends of the compute-efficient frontier measured directly
/// against adjusted compute: x = x_e * C_min^p_x with C_min in PF-days.
struct EmpiricalTrends {
  double p_n = 0.0;
  double n_e = 0.0;  // params at 1 PF-day
  double p_b = 0.0;
  double b_e = 0.0;  // tokens at 1 PF-day
  double p_s = 0.0;
  double s_e = 0.0;  // adjusted steps at 1 PF-day
  double p_d = 0.0;
  double d_e = 0.0;  // tokens at 1 PF-day

  void validate() const;
  static const EmpiricalTrends& appendix_a();
};

/// How the compute exponent splits across model size, batch and steps.
/// p_N + p_B + p_S = 1 by the harmonic-sum identity; p_D = p_B + p_S.
struct AllocationExponents {
  double alpha_c = 0.0;
  double p_n = 0.0;
  double p_b = 0.0;
  double p_s = 0.0;
  double p_d = 0.0;
};

// Compute exponent and allocation split implied by the fitted
// single-variable exponents: alpha_c = 1/(1/alpha_S + 1/alpha_B +
// 1/alpha_N), p_x = alpha_c/alpha_x.
AllocationExponents derived_exponents(const laws::ScalingConstants& k);

// The same split read off the measured trends; the compute exponent is
// the measured alpha_C_min.
AllocationExponents empirical_exponents(const EmpiricalTrends& t,
                                        const laws::ScalingConstants& k);

/// Optimal training plan for one adjusted-compute budget. s_min counts
/// the optimization steps actually executed when training at the
/// critical batch size b, which is twice the large-batch-limit minimum;
/// with that convention 6 * n_opt * b * s_min = 2 * c_min exactly and
/// d_processed = b * s_min is the one-epoch dataset size.
struct Allocation {
  double c_min = 0.0;          // PF-days
  double n_opt = 0.0;          // params
  double b = 0.0;              // tokens
  double s_min = 0.0;          // steps
  double d_processed = 0.0;    // tokens
  double predicted_loss = 0.0; // nats
};

// Closed-form compute-efficient plan. In derived mode the model size,
// loss and step count come from the frontier algebra on the
// learning-curve surface; in empirical mode the model size follows the
// measured N(C_min) trend and the loss the measured L(C_min) law. Both
// modes then take b at the critical batch size for the predicted loss,
// which pins s_min through the compute identity.
Allocation optimal_allocation(double c_min_pf_days, const laws::ScalingConstants& k,
                              Mode mode = Mode::derived);

// Same frontier algebra with the learning-curve surface replaced by a
// fitted one; the critical-batch law still comes from k. Derived mode
// only.
Allocation optimal_allocation(double c_min_pf_days, const laws::ScalingConstants& k,
                              const laws::LossNSConstants& surface);

// Compute scale of the derived frontier: the budget (PF-days) at which
// the predicted loss reaches 1 nat.
double derived_compute_scale(const laws::ScalingConstants& k);

struct EfficiencyRatios {
  double n_ratio = 0.0;
  double s_ratio = 0.0;
  double c_ratio = 0.0;
};

// Cost of training to convergence fraction f versus f_prime at fixed
// final loss (f is the relative excess over the converged loss).
// Compute-efficient training has f = alpha_N/alpha_S.
EfficiencyRatios efficient_vs_converged(double f, double f_prime,
                                        const laws::ScalingConstants& k);

struct SuboptimalOverhead {
  double compute_overhead = 0.0;
  double step_ratio = 0.0;
};

// Extra compute and the step count change from training a model
// ratio = N/N_eff times the compute-optimal size to the same loss.
// Ratios at or below min_feasible_size_ratio can never reach the target
// and throw InfeasibleSizeRatio.
SuboptimalOverhead suboptimal_overhead(double ratio, const laws::ScalingConstants& k);
double min_feasible_size_ratio(const laws::ScalingConstants& k);

// Tokens processed when spending c_min optimally for exactly one epoch:
// 2 * C_min / (6 * N(C_min)), with N from the measured trend.
double data_trajectory(double c_min_pf_days, const laws::ScalingConstants& k,
                       const EmpiricalTrends& t = EmpiricalTrends::appendix_a());

// Dataset size needed to hold the overfitting fraction at delta while
// following the same model-size trajectory; grows more slowly than the
// one-epoch trajectory.
double overfit_data_trajectory(double c_min_pf_days, double delta,
                               const laws::LossNDConstants& j,
                               const EmpiricalTrends& t = EmpiricalTrends::appendix_a());

struct Intersection {
  double c_star = 0.0;  // PF-days
  double n_star = 0.0;  // params
  double d_star = 0.0;  // tokens
  double l_star = 0.0;  // nats
};

// Budget at which the data-limited loss of the one-epoch trajectory
// crosses the compute-frontier loss, beyond which the two predictions
// contradict each other. Empty when the two power laws have equal
// effective exponents and never cross.
std::optional<Intersection> intersection_point(
    const laws::ScalingConstants& k,
    const EmpiricalTrends& t = EmpiricalTrends::appendix_a());

// Allocations over a budget grid, and the plot-ready CSV form with
// header c_min,n_opt,b,s_min,d,loss.
std::vector<Allocation> frontier_sweep(const std::vector<double>& budgets_pf_days,
                                       const laws::ScalingConstants& k,
                                       Mode mode = Mode::derived);
void sweep_to_csv(const std::vector<Allocation>& sweep, std::ostream& out);

}  // namespace scalekit::frontier
