#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scalekit/fit.hpp"
#include "scalekit/laws.hpp"
#include "scalekit/run_log.hpp"

namespace scalekit::fit {

/// Grid specification for synthetic training runs. One run per model
/// size when d_grid is empty (unlimited data); one run per (model,
/// dataset) pair otherwise, early-stopped at the minimum of its noisy
/// test loss. truncated_run / one_layer_run name a run index to emit
/// cut short (visibly unconverged) or with a single layer, for
/// exercising the exclusion rules.
struct SyntheticDesign {
  std::vector<double> n_grid;
  std::vector<double> d_grid;
  std::uint32_t n_layer = 12;
  double batch_tokens = 524288.0;
  std::int64_t min_steps = 64;
  std::int64_t max_steps = 1 << 20;
  int samples_per_run = 24;  // log-spaced step samples
  std::int64_t warmup_steps = 0;
  int truncated_run = -1;
  int one_layer_run = -1;

  void validate() const;
};

struct SyntheticRunLabel {
  std::string run_id;
  double n_params = 0.0;
  std::optional<double> dataset_tokens;
  bool converged = true;
  double final_true_loss = 0.0;  // model value before noise at the last kept step
};

struct SyntheticRuns {
  std::vector<RunRecord> records;
  std::vector<SyntheticRunLabel> labels;
};

/// Samples learning curves from the joint model/steps surface implied
/// by the truth constants, with the batch-size correction applied at
/// the curve's own loss (solved by bisection) and multiplicative
/// log-normal noise of relative width sigma. sigma = 0 reproduces the
/// model exactly; a fixed seed fixes every byte of the output.
SyntheticRuns generate_synthetic_runs(const laws::ScalingConstants& truth,
                                      const SyntheticDesign& design, double sigma,
                                      std::uint64_t seed);

// Exact (noise-free) surface samples on a grid, the simplest round-trip
// inputs for the surface fitters.
std::vector<NDPoint> synthetic_nd_points(const laws::LossNDConstants& j,
                                         const std::vector<double>& n_grid,
                                         const std::vector<double>& d_grid);
std::vector<NSPoint> synthetic_ns_points(const laws::LossNSConstants& j,
                                         const std::vector<double>& n_grid,
                                         const std::vector<double>& s_grid);

// The loss the generator's infinite-data curve converges to at a given
// actual step count: the fixed point of the batch-corrected surface.
double synthetic_curve_loss(double n_params, double actual_steps, double batch_tokens,
                            const laws::ScalingConstants& truth);

}  // namespace scalekit::fit
