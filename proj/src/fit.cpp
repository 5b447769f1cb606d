#include "scalekit/fit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "scalekit/arch.hpp"
#include "scalekit/errors.hpp"
#include "scalekit/nls.hpp"

namespace scalekit::fit {

namespace {

// Multi-start grid for the surface-fit exponents, 0.02 to 1.0
// log-spaced. Coarse on purpose: each node only has to land in the
// right basin before Gauss-Newton takes over.
std::vector<double> exponent_grid() {
  std::vector<double> g;
  const int n = 8;
  for (int i = 0; i < n; ++i) {
    g.push_back(0.02 * std::pow(50.0, static_cast<double>(i) / (n - 1)));
  }
  return g;
}

void require_positive(double v, const char* what) {
  if (!std::isfinite(v) || v <= 0.0) {
    throw std::invalid_argument(std::string(what) + " must be finite and > 0");
  }
}

std::size_t distinct_count(const std::vector<double>& v) {
  std::set<double> s(v.begin(), v.end());
  return s.size();
}

// Least squares for y = a*u + b*v, the scale seed at fixed exponents.
bool solve_2x2_ls(const std::vector<double>& u, const std::vector<double>& v,
                  const std::vector<double>& y, double& a, double& b) {
  double suu = 0, svv = 0, suv = 0, suy = 0, svy = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    suu += u[i] * u[i];
    svv += v[i] * v[i];
    suv += u[i] * v[i];
    suy += u[i] * y[i];
    svy += v[i] * y[i];
  }
  double det = suu * svv - suv * suv;
  if (det <= 0.0 || !std::isfinite(det)) return false;
  a = (suy * svv - svy * suv) / det;
  b = (svy * suu - suy * suv) / det;
  return std::isfinite(a) && std::isfinite(b);
}

struct SurfaceFit {
  std::vector<double> theta;  // log-parameterized (exp1, exp2, scale1, scale2)
  double rss = HUGE_VAL;
  std::vector<double> residuals;
};

// Shared multi-start driver for the two four-parameter surfaces. The
// callers provide the residual/Jacobian callback and a scale-seed
// builder for a fixed exponent pair.
template <typename ResidualFn, typename SeedFn>
SurfaceFit fit_surface(int m, const ResidualFn& fn, const SeedFn& seed_for) {
  SurfaceFit best;
  auto grid = exponent_grid();
  for (double e1 : grid) {
    for (double e2 : grid) {
      std::vector<double> theta0 = seed_for(e1, e2);
      if (theta0.empty()) continue;
      nls::Result res;
      try {
        res = nls::solve(fn, theta0, m);
      } catch (const std::invalid_argument&) {
        continue;
      }
      if (res.rss < best.rss) {
        best.rss = res.rss;
        best.theta = res.theta;
      }
    }
  }
  if (best.theta.empty()) {
    throw FitError("no feasible starting point on the exponent grid");
  }
  best.residuals.resize(m);
  fn(best.theta.data(), best.residuals.data(), nullptr);
  return best;
}

bool exponents_feasible(double e1, double e2) {
  return e1 > 1e-4 && e1 < 10.0 && e2 > 1e-4 && e2 < 10.0;
}

}  // namespace

std::string to_string(LawId law) {
  switch (law) {
    case LawId::loss_n: return "n";
    case LawId::loss_d: return "d";
    case LawId::loss_c: return "c";
    case LawId::loss_cmin: return "cmin";
    case LawId::loss_nd: return "nd";
    case LawId::loss_ns: return "ns";
    case LawId::bcrit: return "bcrit";
    case LawId::pareto: return "pareto";
  }
  return "?";
}

LawId law_from_string(const std::string& name) {
  if (name == "n") return LawId::loss_n;
  if (name == "d") return LawId::loss_d;
  if (name == "c") return LawId::loss_c;
  if (name == "cmin") return LawId::loss_cmin;
  if (name == "nd") return LawId::loss_nd;
  if (name == "ns") return LawId::loss_ns;
  if (name == "bcrit") return LawId::bcrit;
  if (name == "pareto") return LawId::pareto;
  throw std::invalid_argument("unknown law: " + name +
                              " (expected n, d, c, cmin, nd, ns, bcrit or pareto)");
}

std::vector<std::size_t> FitResult::outlier_indices(double z) const {
  std::vector<std::size_t> out;
  if (residuals.size() < 3) return out;
  double mean = 0.0;
  for (double r : residuals) mean += r;
  mean /= static_cast<double>(residuals.size());
  double var = 0.0;
  for (double r : residuals) var += (r - mean) * (r - mean);
  var /= static_cast<double>(residuals.size());
  double sd = std::sqrt(var);
  if (sd == 0.0) return out;
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    if (std::fabs(residuals[i] - mean) > z * sd) out.push_back(i);
  }
  return out;
}

nlohmann::json to_json(const FitResult& r) {
  nlohmann::json j;
  j["law"] = to_string(r.law);
  j["params"] = r.params;
  j["rss"] = r.rss;
  j["n_points"] = r.n_points;
  j["excluded_count"] = r.exclusions.size();
  j["exclusions"] = r.exclusions;
  j["residuals_log"] = r.residuals;
  return j;
}

FitResult fit_power_law(const std::vector<XY>& points) {
  std::vector<double> xs;
  for (const auto& p : points) {
    require_positive(p.x, "x");
    require_positive(p.y, "y");
    xs.push_back(p.x);
  }
  if (points.size() < 2 || distinct_count(xs) < 2) {
    throw FitError("power-law fit needs at least two points with distinct x");
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(points.size());
  for (const auto& p : points) {
    double lx = std::log(p.x);
    double ly = std::log(p.y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double intercept = (sy - slope * sx) / n;
  if (slope == 0.0) {
    throw FitError("flat trend: power-law scale is unidentifiable at zero exponent");
  }
  double alpha = -slope;
  double x_c = std::exp(intercept / alpha);

  FitResult out;
  out.law = LawId::loss_n;
  out.params = {{"alpha", alpha}, {"x_c", x_c}};
  out.n_points = points.size();
  out.residuals.reserve(points.size());
  for (const auto& p : points) {
    double r = intercept + slope * std::log(p.x) - std::log(p.y);
    out.residuals.push_back(r);
    out.rss += r * r;
  }
  return out;
}

FitResult fit_loss_nd(const std::vector<NDPoint>& points) {
  std::vector<double> ns, ds;
  for (const auto& p : points) {
    require_positive(p.n_params, "n_params");
    require_positive(p.d_tokens, "d_tokens");
    require_positive(p.loss, "loss");
    ns.push_back(p.n_params);
    ds.push_back(p.d_tokens);
  }
  if (points.size() < 4) throw FitError("surface fit needs at least four points");
  if (distinct_count(ns) < 2 || distinct_count(ds) < 2) {
    throw FitError("degenerate design: points must span both model and data size");
  }

  const int m = static_cast<int>(points.size());
  auto fn = [&points](const double* theta, double* r, double* jac) {
    double a_n = std::exp(theta[0]);
    double a_d = std::exp(theta[1]);
    if (!exponents_feasible(a_n, a_d)) return false;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto& p = points[i];
      double t1 = std::exp((a_n / a_d) * (theta[2] - std::log(p.n_params)));
      double t2 = std::exp(theta[3] - std::log(p.d_tokens));
      double q = t1 + t2;
      r[i] = a_d * std::log(q) - std::log(p.loss);
      if (jac != nullptr) {
        double dn = theta[2] - std::log(p.n_params);
        jac[i * 4 + 0] = a_n * dn * t1 / q;
        jac[i * 4 + 1] = a_d * std::log(q) - a_n * dn * t1 / q;
        jac[i * 4 + 2] = a_n * t1 / q;
        jac[i * 4 + 3] = a_d * t2 / q;
      }
    }
    return true;
  };

  auto seed_for = [&points](double a_n, double a_d) -> std::vector<double> {
    std::vector<double> u, v, y;
    double mean_y = 0.0;
    for (const auto& p : points) {
      u.push_back(std::pow(p.n_params, -a_n / a_d));
      v.push_back(1.0 / p.d_tokens);
      double yi = std::pow(p.loss, 1.0 / a_d);
      y.push_back(yi);
      mean_y += yi;
    }
    mean_y /= static_cast<double>(points.size());
    double a = 0.0, b = 0.0;
    if (!solve_2x2_ls(u, v, y, a, b)) return {};
    double mean_u = 0.0, mean_v = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      mean_u += u[i];
      mean_v += v[i];
    }
    mean_u /= static_cast<double>(u.size());
    mean_v /= static_cast<double>(v.size());
    if (a <= 0.0) a = 0.5 * mean_y / mean_u;
    if (b <= 0.0) b = 0.5 * mean_y / mean_v;
    double ln_nc = (a_d / a_n) * std::log(a);
    double ln_dc = std::log(b);
    if (!std::isfinite(ln_nc) || !std::isfinite(ln_dc)) return {};
    return {std::log(a_n), std::log(a_d), ln_nc, ln_dc};
  };

  SurfaceFit best = fit_surface(m, fn, seed_for);

  FitResult out;
  out.law = LawId::loss_nd;
  out.params = {{"alpha_N", std::exp(best.theta[0])},
                {"alpha_D", std::exp(best.theta[1])},
                {"N_c", std::exp(best.theta[2])},
                {"D_c", std::exp(best.theta[3])}};
  out.rss = best.rss;
  out.n_points = points.size();
  out.residuals = std::move(best.residuals);
  return out;
}

FitResult fit_loss_ns(const std::vector<NSPoint>& points) {
  std::vector<double> ns, ss;
  for (const auto& p : points) {
    require_positive(p.n_params, "n_params");
    require_positive(p.s_min, "s_min");
    require_positive(p.loss, "loss");
    ns.push_back(p.n_params);
    ss.push_back(p.s_min);
  }
  if (points.size() < 4) throw FitError("surface fit needs at least four points");
  if (distinct_count(ns) < 2 || distinct_count(ss) < 2) {
    throw FitError("degenerate design: points must span both model size and steps");
  }

  const int m = static_cast<int>(points.size());
  auto fn = [&points](const double* theta, double* r, double* jac) {
    double a_n = std::exp(theta[0]);
    double a_s = std::exp(theta[1]);
    if (!exponents_feasible(a_n, a_s)) return false;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto& p = points[i];
      double dn = theta[2] - std::log(p.n_params);
      double dsv = theta[3] - std::log(p.s_min);
      double t1 = std::exp(a_n * dn);
      double t3 = std::exp(a_s * dsv);
      double q = t1 + t3;
      r[i] = std::log(q) - std::log(p.loss);
      if (jac != nullptr) {
        jac[i * 4 + 0] = a_n * dn * t1 / q;
        jac[i * 4 + 1] = a_s * dsv * t3 / q;
        jac[i * 4 + 2] = a_n * t1 / q;
        jac[i * 4 + 3] = a_s * t3 / q;
      }
    }
    return true;
  };

  auto seed_for = [&points](double a_n, double a_s) -> std::vector<double> {
    std::vector<double> u, v, y;
    double mean_y = 0.0;
    for (const auto& p : points) {
      u.push_back(std::pow(p.n_params, -a_n));
      v.push_back(std::pow(p.s_min, -a_s));
      y.push_back(p.loss);
      mean_y += p.loss;
    }
    mean_y /= static_cast<double>(points.size());
    double a = 0.0, b = 0.0;
    if (!solve_2x2_ls(u, v, y, a, b)) return {};
    double mean_u = 0.0, mean_v = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      mean_u += u[i];
      mean_v += v[i];
    }
    mean_u /= static_cast<double>(u.size());
    mean_v /= static_cast<double>(v.size());
    if (a <= 0.0) a = 0.5 * mean_y / mean_u;
    if (b <= 0.0) b = 0.5 * mean_y / mean_v;
    double ln_nc = std::log(a) / a_n;
    double ln_sc = std::log(b) / a_s;
    if (!std::isfinite(ln_nc) || !std::isfinite(ln_sc)) return {};
    return {std::log(a_n), std::log(a_s), ln_nc, ln_sc};
  };

  SurfaceFit best = fit_surface(m, fn, seed_for);

  FitResult out;
  out.law = LawId::loss_ns;
  out.params = {{"alpha_N", std::exp(best.theta[0])},
                {"alpha_S", std::exp(best.theta[1])},
                {"N_c", std::exp(best.theta[2])},
                {"S_c", std::exp(best.theta[3])}};
  out.rss = best.rss;
  out.n_points = points.size();
  out.residuals = std::move(best.residuals);
  return out;
}

FitResult fit_bcrit(const std::vector<batch::ParetoFront>& fronts) {
  std::vector<XY> points;
  for (const auto& f : fronts) {
    points.push_back({f.target_loss, f.b_crit});
  }
  std::vector<double> losses;
  for (const auto& p : points) losses.push_back(p.x);
  if (points.size() < 2 || distinct_count(losses) < 2) {
    throw FitError("critical-batch fit needs at least two fronts at distinct losses");
  }
  FitResult lin = fit_power_law(points);
  double alpha = lin.params.at("alpha");
  if (alpha <= 0.0) {
    throw FitError("critical batch size does not shrink with loss; exponent unidentifiable");
  }
  // (x_c / L)^alpha == B_star / L^(1/alpha_B) with alpha_B = 1/alpha.
  FitResult out;
  out.law = LawId::bcrit;
  out.params = {{"B_star", std::pow(lin.params.at("x_c"), alpha)},
                {"alpha_B", 1.0 / alpha}};
  out.rss = lin.rss;
  out.n_points = lin.n_points;
  out.residuals = std::move(lin.residuals);
  return out;
}

ExclusionPolicy default_policy(LawId law) {
  ExclusionPolicy p;
  switch (law) {
    case LawId::loss_n:
    case LawId::loss_c:
    case LawId::loss_cmin:
      p.drop_one_layer = true;
      p.drop_non_converged = true;
      break;
    default:
      break;
  }
  return p;
}

namespace {

// Record with the largest step per run, runs ordered by run_id.
std::vector<const RunRecord*> final_records(const std::vector<RunRecord>& records) {
  std::map<std::string, const RunRecord*> last;
  for (const auto& r : records) {
    auto [it, inserted] = last.emplace(r.run_id, &r);
    if (!inserted && r.step > it->second->step) it->second = &r;
  }
  std::vector<const RunRecord*> out;
  for (const auto& [id, rec] : last) out.push_back(rec);
  return out;
}

}  // namespace

std::vector<XY> final_loss_points(const std::vector<RunRecord>& records) {
  std::vector<XY> out;
  for (const RunRecord* r : final_records(records)) {
    out.push_back({r->n_params, r->test_loss});
  }
  return out;
}

std::vector<XY> dataset_loss_points(const std::vector<RunRecord>& records) {
  std::vector<XY> out;
  for (const RunRecord* r : final_records(records)) {
    if (r->dataset_tokens) out.push_back({*r->dataset_tokens, r->test_loss});
  }
  return out;
}

std::vector<XY> compute_loss_points(const std::vector<RunRecord>& records,
                                    const laws::ScalingConstants& k,
                                    bool adjust_to_cmin) {
  std::vector<XY> out;
  for (const RunRecord* r : final_records(records)) {
    double c = arch::training_compute(r->n_params, r->batch_tokens,
                                      static_cast<double>(r->step))
                   .pf_days;
    if (adjust_to_cmin) {
      c = batch::compute_to_cmin(c, r->batch_tokens, r->test_loss, k);
    }
    out.push_back({c, r->test_loss});
  }
  return out;
}

std::vector<NDPoint> nd_points(const std::vector<RunRecord>& records) {
  std::vector<NDPoint> out;
  for (const RunRecord* r : final_records(records)) {
    if (r->dataset_tokens) out.push_back({r->n_params, *r->dataset_tokens, r->test_loss});
  }
  return out;
}

std::vector<NSPoint> ns_points(const std::vector<RunRecord>& records,
                               const laws::ScalingConstants& k) {
  std::vector<NSPoint> out;
  for (const auto& r : records) {
    double s_min = batch::steps_to_smin(static_cast<double>(r.step), r.batch_tokens,
                                        r.test_loss, k);
    out.push_back({r.n_params, s_min, r.test_loss});
  }
  std::stable_sort(out.begin(), out.end(), [](const NSPoint& a, const NSPoint& b) {
    if (a.n_params != b.n_params) return a.n_params < b.n_params;
    return a.s_min < b.s_min;
  });
  return out;
}

FitResult fit_from_records(const std::vector<RunRecord>& records, LawId law,
                           const laws::ScalingConstants& k) {
  auto outcome = apply_exclusions(records, default_policy(law));
  std::vector<std::string> reasons;
  for (const auto& e : outcome.excluded) {
    reasons.push_back(e.record.run_id + " step " + std::to_string(e.record.step) +
                      ": " + e.reason);
  }

  FitResult result;
  switch (law) {
    case LawId::loss_n:
      result = fit_power_law(final_loss_points(outcome.kept));
      result.params = {{"alpha_N", result.params.at("alpha")},
                       {"N_c", result.params.at("x_c")}};
      break;
    case LawId::loss_d:
      result = fit_power_law(dataset_loss_points(outcome.kept));
      result.params = {{"alpha_D", result.params.at("alpha")},
                       {"D_c", result.params.at("x_c")}};
      break;
    case LawId::loss_c:
      result = fit_power_law(compute_loss_points(outcome.kept, k, false));
      result.params = {{"alpha_C", result.params.at("alpha")},
                       {"C_c", result.params.at("x_c")}};
      break;
    case LawId::loss_cmin:
      result = fit_power_law(compute_loss_points(outcome.kept, k, true));
      result.params = {{"alpha_C_min", result.params.at("alpha")},
                       {"C_c_min", result.params.at("x_c")}};
      break;
    case LawId::loss_nd:
      result = fit_loss_nd(nd_points(outcome.kept));
      break;
    case LawId::loss_ns:
      result = fit_loss_ns(ns_points(outcome.kept, k));
      break;
    default:
      throw std::invalid_argument("fit_from_records supports the record-based laws only");
  }
  result.law = law;
  result.exclusions = std::move(reasons);
  return result;
}

}  // namespace scalekit::fit
