#include "scalekit/laws.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace scalekit::laws {

namespace {

void require_positive_finite(double v, const char* name) {
  if (!std::isfinite(v) || v <= 0.0) {
    throw std::invalid_argument(std::string(name) + " must be finite and > 0");
  }
}

double get_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) {
    throw std::invalid_argument(std::string("missing key: ") + key);
  }
  if (!j.at(key).is_number()) {
    throw std::invalid_argument(std::string("key is not a number: ") + key);
  }
  return j.at(key).get<double>();
}

void maybe_merge(const nlohmann::json& j, const char* key, double& slot) {
  if (j.contains(key)) {
    if (!j.at(key).is_number()) {
      throw std::invalid_argument(std::string("key is not a number: ") + key);
    }
    slot = j.at(key).get<double>();
  }
}

}  // namespace

void ScalingConstants::validate() const {
  require_positive_finite(alpha_N, "alpha_N");
  require_positive_finite(alpha_D, "alpha_D");
  require_positive_finite(alpha_C, "alpha_C");
  require_positive_finite(alpha_C_min, "alpha_C_min");
  require_positive_finite(alpha_B, "alpha_B");
  require_positive_finite(alpha_S, "alpha_S");
  require_positive_finite(N_c, "N_c");
  require_positive_finite(D_c, "D_c");
  require_positive_finite(C_c, "C_c");
  require_positive_finite(C_c_min, "C_c_min");
  require_positive_finite(B_star, "B_star");
  require_positive_finite(S_c, "S_c");
}

const ScalingConstants& ScalingConstants::appendix_a() {
  static const ScalingConstants k = [] {
    ScalingConstants c;
    c.alpha_N = 0.076;
    c.alpha_D = 0.095;
    c.alpha_C = 0.057;
    c.alpha_C_min = 0.050;
    c.alpha_B = 0.21;
    c.alpha_S = 0.76;
    c.N_c = 8.8e13;
    c.D_c = 5.4e13;
    c.C_c = 1.6e7;
    c.C_c_min = 3.1e8;
    c.B_star = 2.1e8;
    c.S_c = 2.1e3;
    c.validate();
    return c;
  }();
  return k;
}

void LossNDConstants::validate() const {
  require_positive_finite(alpha_N, "alpha_N");
  require_positive_finite(alpha_D, "alpha_D");
  require_positive_finite(N_c, "N_c");
  require_positive_finite(D_c, "D_c");
}

const LossNDConstants& LossNDConstants::table_2() {
  static const LossNDConstants k = [] {
    LossNDConstants c;
    c.alpha_N = 0.076;
    c.alpha_D = 0.103;
    c.N_c = 6.4e13;
    c.D_c = 1.8e13;
    c.validate();
    return c;
  }();
  return k;
}

void LossNSConstants::validate() const {
  require_positive_finite(alpha_N, "alpha_N");
  require_positive_finite(alpha_S, "alpha_S");
  require_positive_finite(N_c, "N_c");
  require_positive_finite(S_c, "S_c");
}

const LossNSConstants& LossNSConstants::table_3() {
  static const LossNSConstants k = [] {
    LossNSConstants c;
    c.alpha_N = 0.077;
    c.alpha_S = 0.76;
    c.N_c = 6.5e13;
    c.S_c = 2.1e3;
    c.validate();
    return c;
  }();
  return k;
}

nlohmann::json to_json(const ScalingConstants& k) {
  return {
      {"alpha_N", k.alpha_N}, {"alpha_D", k.alpha_D},
      {"alpha_C", k.alpha_C}, {"alpha_C_min", k.alpha_C_min},
      {"alpha_B", k.alpha_B}, {"alpha_S", k.alpha_S},
      {"N_c", k.N_c},         {"D_c", k.D_c},
      {"C_c", k.C_c},         {"C_c_min", k.C_c_min},
      {"B_star", k.B_star},   {"S_c", k.S_c},
  };
}

ScalingConstants scaling_constants_from_json(const nlohmann::json& j) {
  ScalingConstants k;
  k.alpha_N = get_field(j, "alpha_N");
  k.alpha_D = get_field(j, "alpha_D");
  k.alpha_C = get_field(j, "alpha_C");
  k.alpha_C_min = get_field(j, "alpha_C_min");
  k.alpha_B = get_field(j, "alpha_B");
  k.alpha_S = get_field(j, "alpha_S");
  k.N_c = get_field(j, "N_c");
  k.D_c = get_field(j, "D_c");
  k.C_c = get_field(j, "C_c");
  k.C_c_min = get_field(j, "C_c_min");
  k.B_star = get_field(j, "B_star");
  k.S_c = get_field(j, "S_c");
  k.validate();
  return k;
}

ScalingConstants merge_from_json(ScalingConstants base, const nlohmann::json& j) {
  maybe_merge(j, "alpha_N", base.alpha_N);
  maybe_merge(j, "alpha_D", base.alpha_D);
  maybe_merge(j, "alpha_C", base.alpha_C);
  maybe_merge(j, "alpha_C_min", base.alpha_C_min);
  maybe_merge(j, "alpha_B", base.alpha_B);
  maybe_merge(j, "alpha_S", base.alpha_S);
  maybe_merge(j, "N_c", base.N_c);
  maybe_merge(j, "D_c", base.D_c);
  maybe_merge(j, "C_c", base.C_c);
  maybe_merge(j, "C_c_min", base.C_c_min);
  maybe_merge(j, "B_star", base.B_star);
  maybe_merge(j, "S_c", base.S_c);
  base.validate();
  return base;
}

nlohmann::json to_json(const LossNDConstants& k) {
  return {{"alpha_N", k.alpha_N},
          {"alpha_D", k.alpha_D},
          {"N_c", k.N_c},
          {"D_c", k.D_c}};
}

LossNDConstants nd_constants_from_json(const nlohmann::json& j) {
  LossNDConstants k;
  k.alpha_N = get_field(j, "alpha_N");
  k.alpha_D = get_field(j, "alpha_D");
  k.N_c = get_field(j, "N_c");
  k.D_c = get_field(j, "D_c");
  k.validate();
  return k;
}

nlohmann::json to_json(const LossNSConstants& k) {
  return {{"alpha_N", k.alpha_N},
          {"alpha_S", k.alpha_S},
          {"N_c", k.N_c},
          {"S_c", k.S_c}};
}

LossNSConstants ns_constants_from_json(const nlohmann::json& j) {
  LossNSConstants k;
  k.alpha_N = get_field(j, "alpha_N");
  k.alpha_S = get_field(j, "alpha_S");
  k.N_c = get_field(j, "N_c");
  k.S_c = get_field(j, "S_c");
  k.validate();
  return k;
}

double loss_of_n(double n_params, const ScalingConstants& k) {
  require_positive_finite(n_params, "n_params");
  return std::pow(k.N_c / n_params, k.alpha_N);
}

double loss_of_d(double d_tokens, const ScalingConstants& k) {
  require_positive_finite(d_tokens, "d_tokens");
  return std::pow(k.D_c / d_tokens, k.alpha_D);
}

double loss_of_cmin(double c_min_pf_days, const ScalingConstants& k) {
  require_positive_finite(c_min_pf_days, "c_min_pf_days");
  return std::pow(k.C_c_min / c_min_pf_days, k.alpha_C_min);
}

double critical_batch(double loss_nats, const ScalingConstants& k) {
  require_positive_finite(loss_nats, "loss_nats");
  return k.B_star * std::pow(loss_nats, -1.0 / k.alpha_B);
}

double loss_of_nd(double n_params, double d_tokens, const LossNDConstants& j) {
  require_positive_finite(n_params, "n_params");
  require_positive_finite(d_tokens, "d_tokens");
  double base = std::pow(j.N_c / n_params, j.alpha_N / j.alpha_D) + j.D_c / d_tokens;
  return std::pow(base, j.alpha_D);
}

double converged_loss_nd(double n_params, const LossNDConstants& j) {
  require_positive_finite(n_params, "n_params");
  return std::pow(j.N_c / n_params, j.alpha_N);
}

double overfit_fraction(double n_params, double d_tokens, const LossNDConstants& j) {
  require_positive_finite(n_params, "n_params");
  require_positive_finite(d_tokens, "d_tokens");
  // delta = (1 + x)^alpha_D - 1 with x = (N/N_c)^(alpha_N/alpha_D) * D_c/D,
  // written with log1p/expm1 so small fractions keep full precision.
  double x = std::pow(n_params / j.N_c, j.alpha_N / j.alpha_D) * j.D_c / d_tokens;
  return std::expm1(j.alpha_D * std::log1p(x));
}

double overfit_fraction_ratio(double n_params, double d_tokens, const LossNDConstants& j) {
  return loss_of_nd(n_params, d_tokens, j) / converged_loss_nd(n_params, j) - 1.0;
}

double data_requirement(double n_params, double delta, const LossNDConstants& j) {
  require_positive_finite(n_params, "n_params");
  require_positive_finite(delta, "delta");
  double denom = std::expm1(std::log1p(delta) / j.alpha_D);
  return std::pow(n_params / j.N_c, j.alpha_N / j.alpha_D) * j.D_c / denom;
}

double loss_of_ns(double n_params, double s_min_steps, const LossNSConstants& j) {
  require_positive_finite(n_params, "n_params");
  require_positive_finite(s_min_steps, "s_min_steps");
  return std::pow(j.N_c / n_params, j.alpha_N) + std::pow(j.S_c / s_min_steps, j.alpha_S);
}

double converged_loss_ns(double n_params, const LossNSConstants& j) {
  require_positive_finite(n_params, "n_params");
  return std::pow(j.N_c / n_params, j.alpha_N);
}

std::optional<double> early_stop_bound(double n_params, double d_tokens,
                                       const LossNDConstants& nd,
                                       const LossNSConstants& ns) {
  // Gap between the data-limited loss and the converged loss of the same
  // model, taken from the joint surface so both terms share constants.
  double gap = converged_loss_nd(n_params, nd) * overfit_fraction(n_params, d_tokens, nd);
  if (gap <= 0.0) {
    return std::nullopt;
  }
  double bound = ns.S_c * std::pow(gap, -1.0 / ns.alpha_S);
  if (!std::isfinite(bound)) {
    return std::nullopt;
  }
  return bound;
}

}  // namespace scalekit::laws
