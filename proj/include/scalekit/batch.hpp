#pragma once

#include <iosfwd>
#include <vector>

#include "scalekit/laws.hpp"

namespace scalekit::batch {

/// One (steps, data) observation reaching a fixed loss at some batch
/// size; examples counts tokens, E = B * S.
struct ParetoPoint {
  double steps = 0.0;
  double examples = 0.0;
};

/// Fitted hyperbola (S/s_min - 1)(E/e_min - 1) = 1 for one loss level.
/// b_crit = e_min / s_min is the batch size where time and compute costs
/// balance.
struct ParetoFront {
  double target_loss = 0.0;  // nats
  double s_min = 0.0;        // steps
  double e_min = 0.0;        // tokens
  double b_crit = 0.0;       // tokens
};

// Tokens processed when the loss is reached in S steps: the hyperbola
// solved for E. Throws std::invalid_argument when S <= s_min (the loss
// is unreachable that fast at any batch size).
double tradeoff_curve(double s_min, double e_min, double steps);

// Adjusted minimum steps S_min = S / (1 + B_crit(L)/B): the steps a run
// of S steps at batch B would have needed in the large-batch limit.
double steps_to_smin(double steps, double batch_tokens, double loss_nats,
                     const laws::ScalingConstants& k);

// Adjusted minimum compute C_min = C / (1 + B/B_crit(L)), same run in
// the small-batch limit. Units of C are preserved.
double compute_to_cmin(double compute, double batch_tokens, double loss_nats,
                       const laws::ScalingConstants& k);

// Least-squares fit of the hyperbola to measured points, log E vs log S.
// Deterministic: closed-form two-point seeds, then damped Gauss-Newton
// with both parameters log-parameterized. Throws FitError on fewer than
// two distinct step counts or when no valid seed exists.
ParetoFront pareto_from_runs(const std::vector<ParetoPoint>& points, double target_loss);

// CSV rows "target_loss,s_min,e_min,b_crit", round-trippable exactly.
void fronts_to_csv(const std::vector<ParetoFront>& fronts, std::ostream& out);
std::vector<ParetoFront> fronts_from_csv(std::istream& in);

}  // namespace scalekit::batch
