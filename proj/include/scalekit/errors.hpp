#pragma once

#include <stdexcept>
#include <string>

namespace scalekit {

/// Thrown when a parameter estimation cannot proceed (too few points,
/// degenerate design, diverging refinement).
struct FitError : std::runtime_error {
  explicit FitError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a requested model-size ratio can never reach the target
/// loss. Carries the smallest ratio that is feasible under the constants
/// in use so callers can clamp.
struct InfeasibleSizeRatio : std::domain_error {
  InfeasibleSizeRatio(const std::string& what, double min_ratio_)
      : std::domain_error(what), min_ratio(min_ratio_) {}
  double min_ratio;
};

}  // namespace scalekit
