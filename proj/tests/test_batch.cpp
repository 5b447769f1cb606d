#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "pinned_values.hpp"
#include "scalekit/batch.hpp"
#include "scalekit/errors.hpp"
#include "scalekit/laws.hpp"

using namespace scalekit;

namespace {
doctest::Approx pin(double v) { return doctest::Approx(v).epsilon(1e-10); }
const laws::ScalingConstants& A = laws::ScalingConstants::appendix_a();
}  // namespace

TEST_CASE("time/compute tradeoff curve") {
  double s = 1e3, e = 1e8;
  CHECK(batch::tradeoff_curve(s, e, 2 * s) == pin(2 * e));
  CHECK(batch::tradeoff_curve(s, e, 1.5 * s) == pin(3 * e));
  CHECK(batch::tradeoff_curve(s, e, 1e12 * s) == doctest::Approx(e).epsilon(1e-10));
  CHECK_THROWS_AS(batch::tradeoff_curve(s, e, s), std::invalid_argument);
  CHECK_THROWS_AS(batch::tradeoff_curve(s, e, 0.5 * s), std::invalid_argument);
}

TEST_CASE("hyperbola round trip") {
  // Far out on the asymptote (examples / e - 1) is a catastrophic
  // cancellation, so the residual check stops at mult = 1e3.
  double s = 3.7e3, e = 5.1e7;
  for (double mult : {1.01, 1.5, 2.0, 17.0, 1e3}) {
    double steps = mult * s;
    double examples = batch::tradeoff_curve(s, e, steps);
    double residual = (steps / s - 1.0) * (examples / e - 1.0);
    CHECK(residual == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("step adjustment to the large-batch frame") {
  double loss = 3.0;
  double b_crit = laws::critical_batch(loss, A);
  CHECK(batch::steps_to_smin(1e5, b_crit, loss, A) == pin(0.5 * 1e5));
  CHECK(batch::steps_to_smin(1e5, 1e30, loss, A) == doctest::Approx(1e5).epsilon(1e-12));
  CHECK(batch::steps_to_smin(1e5, 524288.0, 3.0, A) == pin(pinned::smin_1e5_2p19_3));
  CHECK_THROWS_AS(batch::steps_to_smin(0.0, 1.0, 1.0, A), std::invalid_argument);
}

TEST_CASE("compute adjustment to the small-batch frame") {
  double loss = 3.0;
  double b_crit = laws::critical_batch(loss, A);
  CHECK(batch::compute_to_cmin(42.0, b_crit, loss, A) == pin(21.0));
  CHECK(batch::compute_to_cmin(42.0, 1e-9 * b_crit, loss, A) ==
        doctest::Approx(42.0).epsilon(1e-9));
  CHECK_THROWS_AS(batch::compute_to_cmin(1.0, -1.0, 1.0, A), std::invalid_argument);
}

TEST_CASE("adjusted compute equals the critical-batch retraining cost") {
  // With C = 6NBS, the two corrections compose into C_min = 6 N B_crit S_min
  // identically in B.
  std::mt19937 rng(4242);
  std::uniform_real_distribution<double> log_b(std::log(1e3), std::log(1e9));
  std::uniform_real_distribution<double> log_s(std::log(1e2), std::log(1e7));
  std::uniform_real_distribution<double> uloss(0.8, 6.0);
  for (int i = 0; i < 50; ++i) {
    double n = 1e8, b = std::exp(log_b(rng)), s = std::exp(log_s(rng));
    double loss = uloss(rng);
    double c = 6 * n * b * s;
    double c_min = batch::compute_to_cmin(c, b, loss, A);
    double s_min = batch::steps_to_smin(s, b, loss, A);
    double via_identity = 6 * n * laws::critical_batch(loss, A) * s_min;
    CHECK(c_min == doctest::Approx(via_identity).epsilon(1e-12));
  }
}

TEST_CASE("corrections are monotone in batch size, in opposite directions") {
  double loss = 2.5, s = 1e5, c = 7.0;
  double prev_smin = 0.0, prev_cmin = 1e300;
  for (double b = 1e3; b < 1e12; b *= 10) {
    double s_min = batch::steps_to_smin(s, b, loss, A);
    double c_min = batch::compute_to_cmin(c, b, loss, A);
    CHECK(s_min > prev_smin);
    CHECK(c_min < prev_cmin);
    prev_smin = s_min;
    prev_cmin = c_min;
  }
}

TEST_CASE("pareto front fit, exact points") {
  double s = 1e3, e = 1e8;
  std::vector<batch::ParetoPoint> points;
  for (int i = 0; i < 20; ++i) {
    double steps = s * std::pow(100.0, (i + 1) / 20.0);
    points.push_back({steps, batch::tradeoff_curve(s, e, steps)});
  }
  auto front = batch::pareto_from_runs(points, 2.5);
  CHECK(front.s_min == doctest::Approx(s).epsilon(1e-6));
  CHECK(front.e_min == doctest::Approx(e).epsilon(1e-6));
  CHECK(front.b_crit == doctest::Approx(e / s).epsilon(1e-6));
  CHECK(front.target_loss == 2.5);
}

TEST_CASE("pareto front fit, two points determine the curve") {
  double s = 2e3, e = 4e7;
  std::vector<batch::ParetoPoint> points = {
      {3 * s, batch::tradeoff_curve(s, e, 3 * s)},
      {1.2 * s, batch::tradeoff_curve(s, e, 1.2 * s)},
  };
  auto front = batch::pareto_from_runs(points, 3.0);
  CHECK(front.s_min == doctest::Approx(s).epsilon(1e-9));
  CHECK(front.e_min == doctest::Approx(e).epsilon(1e-9));
}

TEST_CASE("pareto front fit, noisy points") {
  double s = 1e3, e = 1e8;
  std::mt19937_64 rng(99);
  std::normal_distribution<double> gauss(0.0, 0.02);
  std::vector<batch::ParetoPoint> points;
  for (int i = 0; i < 20; ++i) {
    double steps = s * std::pow(100.0, (i + 1) / 20.0);
    double examples = batch::tradeoff_curve(s, e, steps) * std::exp(gauss(rng));
    points.push_back({steps, examples});
  }
  auto front = batch::pareto_from_runs(points, 2.5);
  CHECK(front.s_min == doctest::Approx(s).epsilon(0.02));
  CHECK(front.e_min == doctest::Approx(e).epsilon(0.02));
}

TEST_CASE("pareto front fit rejects degenerate input") {
  CHECK_THROWS_AS(batch::pareto_from_runs({}, 2.0), FitError);
  CHECK_THROWS_AS(batch::pareto_from_runs({{100.0, 1e6}}, 2.0), FitError);
  CHECK_THROWS_AS(batch::pareto_from_runs({{100.0, 1e6}, {100.0, 2e6}}, 2.0), FitError);
}

TEST_CASE("front CSV round trip") {
  std::vector<batch::ParetoFront> fronts = {
      {2.5, 1234.5678901234567, 9.87654321e7, 9.87654321e7 / 1234.5678901234567},
      {3.1, 4.2e2, 1.1e7, 1.1e7 / 4.2e2},
  };
  std::ostringstream out;
  batch::fronts_to_csv(fronts, out);
  std::istringstream in(out.str());
  auto back = batch::fronts_from_csv(in);
  REQUIRE(back.size() == fronts.size());
  for (std::size_t i = 0; i < fronts.size(); ++i) {
    CHECK(back[i].target_loss == fronts[i].target_loss);
    CHECK(back[i].s_min == fronts[i].s_min);
    CHECK(back[i].e_min == fronts[i].e_min);
    CHECK(back[i].b_crit == fronts[i].b_crit);
  }
}
