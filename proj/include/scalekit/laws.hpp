#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace scalekit::laws {

/// Fitted constants for the single-variable power laws and the critical
/// batch size. Exponents are dimensionless; scales carry the unit named in
/// the comment. The `appendix_a` preset is the canonical tokenization-
/// dependent set.
struct ScalingConstants {
  double alpha_N = 0.0;
  double alpha_D = 0.0;
  double alpha_C = 0.0;
  double alpha_C_min = 0.0;
  double alpha_B = 0.0;
  double alpha_S = 0.0;
  double N_c = 0.0;      // non-embedding parameters
  double D_c = 0.0;      // tokens
  double C_c = 0.0;      // PF-days
  double C_c_min = 0.0;  // PF-days
  double B_star = 0.0;   // tokens
  double S_c = 0.0;      // steps

  // Throws std::invalid_argument unless every field is finite and > 0.
  void validate() const;

  static const ScalingConstants& appendix_a();
};

/// Constants of the joint L(N, D) surface. These differ slightly from the
/// single-law set because they come from fitting the full surface.
struct LossNDConstants {
  double alpha_N = 0.0;
  double alpha_D = 0.0;
  double N_c = 0.0;  // non-embedding parameters
  double D_c = 0.0;  // tokens

  void validate() const;

  static const LossNDConstants& table_2();
};

/// Constants of the joint L(N, S_min) learning-curve surface.
struct LossNSConstants {
  double alpha_N = 0.0;
  double alpha_S = 0.0;
  double N_c = 0.0;  // non-embedding parameters
  double S_c = 0.0;  // steps

  void validate() const;

  static const LossNSConstants& table_3();
};

// JSON round trip keyed by the symbol names above ("alpha_N", "N_c", ...).
// `merge_from_json` overwrites only the keys present in the document.
nlohmann::json to_json(const ScalingConstants& k);
ScalingConstants scaling_constants_from_json(const nlohmann::json& j);
ScalingConstants merge_from_json(ScalingConstants base, const nlohmann::json& j);
nlohmann::json to_json(const LossNDConstants& k);
LossNDConstants nd_constants_from_json(const nlohmann::json& j);
nlohmann::json to_json(const LossNSConstants& k);
LossNSConstants ns_constants_from_json(const nlohmann::json& j);

// Converged loss of an N-parameter model on unlimited data, nats/token.
double loss_of_n(double n_params, const ScalingConstants& k);

// Early-stopped loss of a very large model on d_tokens of data.
double loss_of_d(double d_tokens, const ScalingConstants& k);

// Loss attainable with c_min PF-days of optimally allocated compute.
double loss_of_cmin(double c_min_pf_days, const ScalingConstants& k);

// Critical batch size in tokens at the given loss. Diverges as the loss
// approaches zero; non-positive losses are rejected.
double critical_batch(double loss_nats, const ScalingConstants& k);

// Joint model-size / dataset-size surface,
//   L(N, D) = [ (N_c/N)^(alpha_N/alpha_D) + D_c/D ]^alpha_D.
double loss_of_nd(double n_params, double d_tokens, const LossNDConstants& j);

// Converged loss (N_c/N)^alpha_N under the joint-fit constants, i.e. the
// D -> infinity limit of loss_of_nd.
double converged_loss_nd(double n_params, const LossNDConstants& j);

// Overfitting fraction delta_L = L(N,D)/L(N,inf) - 1, evaluated in the
// closed form that is stable for small values.
double overfit_fraction(double n_params, double d_tokens, const LossNDConstants& j);

// The same quantity computed literally from the ratio of the two losses.
// Kept as an independent route; agrees with overfit_fraction to machine
// precision wherever the subtraction is well conditioned.
double overfit_fraction_ratio(double n_params, double d_tokens, const LossNDConstants& j);

// Smallest dataset keeping the overfitting fraction at or below delta.
double data_requirement(double n_params, double delta, const LossNDConstants& j);

// Learning-curve surface L(N, S_min); s_min must already be adjusted to
// the large-batch frame.
double loss_of_ns(double n_params, double s_min_steps, const LossNSConstants& j);

// Converged loss (N_c/N)^alpha_N under the learning-curve constants.
double converged_loss_ns(double n_params, const LossNSConstants& j);

// Lower bound on the early-stopping step when training an N-parameter
// model on d_tokens. Empty when the overfitting gap underflows and no
// finite bound exists.
std::optional<double> early_stop_bound(double n_params, double d_tokens,
                                       const LossNDConstants& nd,
                                       const LossNSConstants& ns);

}  // namespace scalekit::laws
