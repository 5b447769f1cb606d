#pragma once

#include <map>
#include <string>
#include <vector>

#include "scalekit/batch.hpp"
#include "scalekit/laws.hpp"
#include "scalekit/run_log.hpp"

#include <json.hpp>

namespace scalekit::fit {

enum class LawId {
  loss_n,     // converged loss vs model size
  loss_d,     // early-stopped loss vs dataset size
  loss_c,     // loss vs raw training compute
  loss_cmin,  // loss vs batch-adjusted compute
  loss_nd,    // joint model/data surface
  loss_ns,    // joint model/steps surface
  bcrit,      // critical batch size vs loss
  pareto,     // steps/data tradeoff at fixed loss
};

std::string to_string(LawId law);
LawId law_from_string(const std::string& name);

/// Estimated parameters for one law family plus the diagnostics needed
/// to judge the fit: log-space residuals per kept point and the reasons
/// records were excluded before fitting.
struct FitResult {
  LawId law = LawId::loss_n;
  std::map<std::string, double> params;
  double rss = 0.0;  // sum of squared log-loss residuals
  std::size_t n_points = 0;
  std::vector<std::string> exclusions;
  std::vector<double> residuals;  // model minus data, log space

  // Indices of points whose |residual| exceeds z standard deviations of
  // the residual distribution.
  std::vector<std::size_t> outlier_indices(double z = 3.0) const;
};

nlohmann::json to_json(const FitResult& r);

struct XY {
  double x = 0.0;
  double y = 0.0;
};

struct NDPoint {
  double n_params = 0.0;
  double d_tokens = 0.0;
  double loss = 0.0;
};

struct NSPoint {
  double n_params = 0.0;
  double s_min = 0.0;
  double loss = 0.0;
};

// Straight-line least squares of log y on log x, reported in the
// (x_c / x)^alpha parameterization as {"alpha", "x_c"}. Throws FitError
// with fewer than two distinct x or a flat (zero-exponent) trend.
FitResult fit_power_law(const std::vector<XY>& points);

// Four-parameter fit of the joint model/data surface in log loss.
// Deterministic multi-start over a coarse exponent grid, each start
// refined by damped Gauss-Newton; all parameters log-parameterized.
// Throws FitError when points span fewer than two distinct values of
// either variable or fewer than four points are given.
FitResult fit_loss_nd(const std::vector<NDPoint>& points);

// Same scheme for the model/steps surface; s_min values must already be
// adjusted to the large-batch frame.
FitResult fit_loss_ns(const std::vector<NSPoint>& points);

// Power law of critical batch size against loss from fitted Pareto
// fronts, reported as {"B_star", "alpha_B"} in the B_star / L^(1/alpha_B)
// parameterization.
FitResult fit_bcrit(const std::vector<batch::ParetoFront>& fronts);

// Cleaning defaults per law family: 1-layer models and unconverged runs
// leave the converged-loss fits, warmup steps leave every fit.
ExclusionPolicy default_policy(LawId law);

// Per-run reductions feeding the fitters. "Final" means the record with
// the largest step of each run; runs are ordered by run_id so results
// are reproducible.
std::vector<XY> final_loss_points(const std::vector<RunRecord>& records);
std::vector<XY> dataset_loss_points(const std::vector<RunRecord>& records);
std::vector<XY> compute_loss_points(const std::vector<RunRecord>& records,
                                    const laws::ScalingConstants& k,
                                    bool adjust_to_cmin);
std::vector<NDPoint> nd_points(const std::vector<RunRecord>& records);
std::vector<NSPoint> ns_points(const std::vector<RunRecord>& records,
                               const laws::ScalingConstants& k);

// End-to-end pipeline: exclusions for the law, the matching reduction,
// the matching fitter, parameters renamed to the conventional symbols
// of that family (alpha_N / N_c and so on). Supports the record-based
// families (not bcrit or pareto, which fit front lists instead).
FitResult fit_from_records(const std::vector<RunRecord>& records, LawId law,
                           const laws::ScalingConstants& k);

}  // namespace scalekit::fit
