#include "scalekit/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

namespace scalekit::fit {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Standard-normal draws via Box-Muller on the raw engine output, so the
// byte stream does not depend on a library's distribution
// implementation.
class NormalSource {
 public:
  explicit NormalSource(std::uint64_t seed) : engine_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double radius = std::sqrt(-2.0 * std::log1p(-u1));
    spare_ = radius * std::sin(kTwoPi * u2);
    have_spare_ = true;
    return radius * std::cos(kTwoPi * u2);
  }

 private:
  double uniform() {
    // 53 uniform bits in [0, 1).
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

std::vector<std::int64_t> log_spaced_steps(std::int64_t lo, std::int64_t hi, int count) {
  std::vector<std::int64_t> steps;
  double llo = std::log(static_cast<double>(lo));
  double lhi = std::log(static_cast<double>(hi));
  for (int i = 0; i < count; ++i) {
    double t = count == 1 ? 1.0 : static_cast<double>(i) / (count - 1);
    auto s = static_cast<std::int64_t>(std::llround(std::exp(llo + t * (lhi - llo))));
    s = std::clamp(s, lo, hi);
    if (steps.empty() || s > steps.back()) steps.push_back(s);
  }
  return steps;
}

}  // namespace

void SyntheticDesign::validate() const {
  if (n_grid.empty()) throw std::invalid_argument("n_grid must be nonempty");
  for (double n : n_grid) {
    if (!std::isfinite(n) || n <= 0.0) throw std::invalid_argument("n_grid entries must be > 0");
  }
  for (double d : d_grid) {
    if (!std::isfinite(d) || d <= 0.0) throw std::invalid_argument("d_grid entries must be > 0");
  }
  if (!(batch_tokens > 0.0)) throw std::invalid_argument("batch_tokens must be > 0");
  if (min_steps < 1 || max_steps <= min_steps) {
    throw std::invalid_argument("need 1 <= min_steps < max_steps");
  }
  if (samples_per_run < 2) throw std::invalid_argument("samples_per_run must be >= 2");
  if (warmup_steps < 0) throw std::invalid_argument("warmup_steps must be >= 0");
}

double synthetic_curve_loss(double n_params, double actual_steps, double batch_tokens,
                            const laws::ScalingConstants& truth) {
  double floor = std::pow(truth.N_c / n_params, truth.alpha_N);
  auto curve = [&](double loss) {
    double s_min = actual_steps / (1.0 + laws::critical_batch(loss, truth) / batch_tokens);
    return floor + std::pow(truth.S_c / s_min, truth.alpha_S);
  };
  double lo = floor;
  double hi = curve(lo);
  if (!(hi > lo)) return lo;
  // curve() is decreasing in the loss, so the fixed point is bracketed
  // by [floor, curve(floor)].
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (curve(mid) > mid) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-15 * hi) break;
  }
  return 0.5 * (lo + hi);
}

SyntheticRuns generate_synthetic_runs(const laws::ScalingConstants& truth,
                                      const SyntheticDesign& design, double sigma,
                                      std::uint64_t seed) {
  truth.validate();
  design.validate();
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("sigma must be finite and >= 0");
  }

  NormalSource normals(seed);
  SyntheticRuns out;
  int run_index = 0;

  auto emit_run = [&](double n, std::optional<double> dataset) {
    bool truncated = run_index == design.truncated_run;
    std::uint32_t layers = run_index == design.one_layer_run ? 1u : design.n_layer;
    std::int64_t cap = design.max_steps;
    if (truncated) {
      cap = std::max<std::int64_t>(2 * design.min_steps, design.max_steps / 64);
    }
    char id[32];
    std::snprintf(id, sizeof(id), "run-%03d", run_index);
    ++run_index;

    auto steps = log_spaced_steps(design.min_steps, cap, design.samples_per_run);

    // Infinite-data branch of the curve at each sampled step, and its
    // batch correction; the finite-data curve reuses that correction.
    std::vector<double> truth_loss(steps.size());
    double floor_inf = std::pow(truth.N_c / n, truth.alpha_N);
    double gap = 0.0, s_star = 0.0, floor_nd = 0.0;
    if (dataset) {
      floor_nd = laws::loss_of_nd(
          n, *dataset,
          laws::LossNDConstants{truth.alpha_N, truth.alpha_D, truth.N_c, truth.D_c});
      gap = floor_nd - floor_inf;
      s_star = truth.S_c * std::pow(2.0 / gap, 1.0 / truth.alpha_S);
    }
    for (std::size_t i = 0; i < steps.size(); ++i) {
      double s = static_cast<double>(steps[i]);
      double l_inf = synthetic_curve_loss(n, s, design.batch_tokens, truth);
      if (!dataset) {
        truth_loss[i] = l_inf;
        continue;
      }
      double s_min = s / (1.0 + laws::critical_batch(l_inf, truth) / design.batch_tokens);
      truth_loss[i] = floor_inf + 0.5 * gap * (std::pow(s_star / s_min, truth.alpha_S) +
                                               std::pow(s_min / s_star, truth.alpha_S));
    }

    std::vector<double> observed(truth_loss);
    if (sigma > 0.0) {
      for (double& l : observed) l *= std::exp(sigma * normals.next());
    }

    std::size_t keep = steps.size();
    if (dataset) {
      // Early stopping: discard everything after the observed minimum.
      std::size_t arg_min = 0;
      for (std::size_t i = 1; i < observed.size(); ++i) {
        if (observed[i] < observed[arg_min]) arg_min = i;
      }
      keep = arg_min + 1;
    }

    for (std::size_t i = 0; i < keep; ++i) {
      RunRecord rec;
      rec.run_id = id;
      rec.n_params = n;
      rec.n_layer = layers;
      rec.batch_tokens = design.batch_tokens;
      rec.step = steps[i];
      rec.test_loss = observed[i];
      rec.dataset_tokens = dataset;
      rec.warmup_steps = design.warmup_steps;
      out.records.push_back(std::move(rec));
    }
    out.labels.push_back(
        {id, n, dataset, !truncated, truth_loss[keep - 1]});
  };

  for (double n : design.n_grid) {
    if (design.d_grid.empty()) {
      emit_run(n, std::nullopt);
    } else {
      for (double d : design.d_grid) emit_run(n, d);
    }
  }
  return out;
}

std::vector<NDPoint> synthetic_nd_points(const laws::LossNDConstants& j,
                                         const std::vector<double>& n_grid,
                                         const std::vector<double>& d_grid) {
  std::vector<NDPoint> out;
  for (double n : n_grid) {
    for (double d : d_grid) {
      out.push_back({n, d, laws::loss_of_nd(n, d, j)});
    }
  }
  return out;
}

std::vector<NSPoint> synthetic_ns_points(const laws::LossNSConstants& j,
                                         const std::vector<double>& n_grid,
                                         const std::vector<double>& s_grid) {
  std::vector<NSPoint> out;
  for (double n : n_grid) {
    for (double s : s_grid) {
      out.push_back({n, s, laws::loss_of_ns(n, s, j)});
    }
  }
  return out;
}

}  // namespace scalekit::fit
