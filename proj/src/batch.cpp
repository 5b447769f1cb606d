#include "scalekit/batch.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "scalekit/errors.hpp"
#include "scalekit/nls.hpp"
#include "scalekit/text.hpp"

namespace scalekit::batch {

namespace {

void require_positive(double v, const char* name) {
  if (!std::isfinite(v) || v <= 0.0) {
    throw std::invalid_argument(std::string(name) + " must be finite and > 0");
  }
}

double front_rss(const std::vector<ParetoPoint>& points, double s_min, double e_min) {
  double rss = 0.0;
  for (const auto& p : points) {
    double r = std::log(e_min * p.steps / (p.steps - s_min)) - std::log(p.examples);
    rss += r * r;
  }
  return rss;
}

}  // namespace

double tradeoff_curve(double s_min, double e_min, double steps) {
  require_positive(s_min, "s_min");
  require_positive(e_min, "e_min");
  require_positive(steps, "steps");
  if (steps <= s_min) {
    throw std::invalid_argument("steps must exceed s_min: the loss is unreachable faster");
  }
  return e_min * steps / (steps - s_min);
}

double steps_to_smin(double steps, double batch_tokens, double loss_nats,
                     const laws::ScalingConstants& k) {
  require_positive(steps, "steps");
  require_positive(batch_tokens, "batch_tokens");
  double b_crit = laws::critical_batch(loss_nats, k);
  return steps / (1.0 + b_crit / batch_tokens);
}

double compute_to_cmin(double compute, double batch_tokens, double loss_nats,
                       const laws::ScalingConstants& k) {
  require_positive(compute, "compute");
  require_positive(batch_tokens, "batch_tokens");
  double b_crit = laws::critical_batch(loss_nats, k);
  return compute / (1.0 + batch_tokens / b_crit);
}

ParetoFront pareto_from_runs(const std::vector<ParetoPoint>& points, double target_loss) {
  require_positive(target_loss, "target_loss");
  for (const auto& p : points) {
    require_positive(p.steps, "steps");
    require_positive(p.examples, "examples");
  }
  double min_steps = HUGE_VAL;
  double max_steps = 0.0;
  for (const auto& p : points) {
    min_steps = std::min(min_steps, p.steps);
    max_steps = std::max(max_steps, p.steps);
  }
  if (points.size() < 2 || min_steps == max_steps) {
    throw FitError("pareto fit needs at least two points with distinct step counts");
  }

  // Seed from the exact two-point solution; try every pair and keep the
  // best feasible one. The asymptote-only degenerate layouts produce no
  // feasible pair and are reported as such.
  bool have_seed = false;
  double best_s = 0.0, best_e = 0.0, best_rss = HUGE_VAL;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const auto& a = points[i];
      const auto& b = points[j];
      double denom = b.examples * a.steps - a.examples * b.steps;
      if (denom == 0.0) continue;
      double s = a.steps * b.steps * (b.examples - a.examples) / denom;
      if (!(s > 0.0) || s >= min_steps) continue;
      double e = a.examples * (a.steps - s) / a.steps;
      if (!(e > 0.0)) continue;
      double rss = front_rss(points, s, e);
      if (rss < best_rss) {
        best_rss = rss;
        best_s = s;
        best_e = e;
        have_seed = true;
      }
    }
  }
  if (!have_seed) {
    throw FitError("pareto fit found no feasible hyperbola through the points");
  }

  const int m = static_cast<int>(points.size());
  auto fn = [&points, min_steps](const double* theta, double* r, double* jac) {
    double s = std::exp(theta[0]);
    double e = std::exp(theta[1]);
    if (!(s > 0.0) || s >= min_steps) return false;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto& p = points[i];
      r[i] = std::log(e * p.steps / (p.steps - s)) - std::log(p.examples);
      if (jac != nullptr) {
        jac[i * 2 + 0] = s / (p.steps - s);
        jac[i * 2 + 1] = 1.0;
      }
    }
    return true;
  };
  auto res = nls::solve(fn, {std::log(best_s), std::log(best_e)}, m);

  ParetoFront front;
  front.target_loss = target_loss;
  front.s_min = std::exp(res.theta[0]);
  front.e_min = std::exp(res.theta[1]);
  front.b_crit = front.e_min / front.s_min;
  return front;
}

void fronts_to_csv(const std::vector<ParetoFront>& fronts, std::ostream& out) {
  out << "target_loss,s_min,e_min,b_crit\n";
  for (const auto& f : fronts) {
    out << text::format_double(f.target_loss) << ',' << text::format_double(f.s_min)
        << ',' << text::format_double(f.e_min) << ',' << text::format_double(f.b_crit)
        << '\n';
  }
}

std::vector<ParetoFront> fronts_from_csv(std::istream& in) {
  std::vector<ParetoFront> fronts;
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    auto trimmed = text::trim(line);
    if (trimmed.empty()) continue;
    auto fields = text::split_csv(trimmed);
    if (!saw_header) {
      if (fields != std::vector<std::string>{"target_loss", "s_min", "e_min", "b_crit"}) {
        throw std::invalid_argument("pareto front CSV must start with target_loss,s_min,e_min,b_crit");
      }
      saw_header = true;
      continue;
    }
    if (fields.size() != 4) {
      throw std::invalid_argument("pareto front CSV row must have 4 fields");
    }
    ParetoFront f;
    auto get = [&fields](std::size_t i, const char* name) {
      auto v = text::parse_double(fields[i]);
      if (!v || !(*v > 0.0)) {
        throw std::invalid_argument(std::string("bad pareto front field: ") + name);
      }
      return *v;
    };
    f.target_loss = get(0, "target_loss");
    f.s_min = get(1, "s_min");
    f.e_min = get(2, "e_min");
    f.b_crit = get(3, "b_crit");
    fronts.push_back(f);
  }
  return fronts;
}

}  // namespace scalekit::batch
