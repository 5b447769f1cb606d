#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "pinned_values.hpp"
#include "scalekit/arch.hpp"
#include "scalekit/errors.hpp"
#include "scalekit/frontier.hpp"
#include "scalekit/laws.hpp"

using namespace scalekit;

namespace {
doctest::Approx pin(double v) { return doctest::Approx(v).epsilon(1e-10); }
const laws::ScalingConstants& A = laws::ScalingConstants::appendix_a();

// Loss of an N-parameter model trained at the critical batch size with
// adjusted compute c (PF-days): the self-consistent solution of
//   L = (N_c/N)^aN + (6 N B_* S_c / (L^(1/aB) c))^aS.
// g(L) = L - floor - coeff * L^(-aS/aB) is strictly increasing, so the
// root is unique; g is negative at the floor and positive at
// floor + coeff * floor^(-aS/aB).
double loss_at(double n, double c_pf_days, const laws::ScalingConstants& k) {
  double c_flops = c_pf_days * arch::kFlopsPerPfDay;
  double floor = std::pow(k.N_c / n, k.alpha_N);
  double p = k.alpha_S / k.alpha_B;
  double coeff = std::pow(6.0 * n * k.B_star * k.S_c / c_flops, k.alpha_S);
  auto g = [&](double loss) { return loss - floor - coeff * std::pow(loss, -p); };
  double lo = floor;
  double hi = floor + coeff * std::pow(floor, -p);
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Golden-section minimization of loss_at over ln N.
double brute_force_n_opt(double c_pf_days, const laws::ScalingConstants& k,
                         double n_guess) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = std::log(n_guess) - std::log(100.0);
  double hi = std::log(n_guess) + std::log(100.0);
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = loss_at(std::exp(x1), c_pf_days, k);
  double f2 = loss_at(std::exp(x2), c_pf_days, k);
  for (int i = 0; i < 200; ++i) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = loss_at(std::exp(x1), c_pf_days, k);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = loss_at(std::exp(x2), c_pf_days, k);
    }
  }
  return std::exp(0.5 * (lo + hi));
}
}  // namespace

TEST_CASE("derived allocation exponents") {
  auto e = frontier::derived_exponents(A);
  CHECK(e.alpha_c == pin(pinned::alpha_c_derived));
  CHECK(e.p_n == pin(pinned::alpha_c_derived / A.alpha_N));
  CHECK(e.p_b == pin(pinned::alpha_c_derived / A.alpha_B));
  CHECK(e.p_s == pin(pinned::alpha_c_derived / A.alpha_S));
  CHECK(e.p_n + e.p_b + e.p_s == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e.p_d == doctest::Approx(e.p_b + e.p_s).epsilon(1e-12));
  CHECK(e.p_n == doctest::Approx(0.684).epsilon(0.001));
}

TEST_CASE("derived compute exponent approaches the model exponent when steps are free") {
  laws::ScalingConstants k = A;
  k.alpha_B = 1e9;
  k.alpha_S = 1e9;
  auto e = frontier::derived_exponents(k);
  CHECK(e.alpha_c == doctest::Approx(A.alpha_N).epsilon(1e-6));
}

TEST_CASE("empirical allocation exponents") {
  auto t = frontier::EmpiricalTrends::appendix_a();
  auto e = frontier::empirical_exponents(t, A);
  CHECK(e.alpha_c == 0.050);
  CHECK(e.p_n == 0.73);
  CHECK(e.p_b == 0.24);
  CHECK(e.p_s == 0.03);
  CHECK(e.p_d == 0.27);
  CHECK(e.p_b + e.p_s == doctest::Approx(e.p_d).epsilon(1e-12));
}

TEST_CASE("derived allocation at one PF-day") {
  auto a = frontier::optimal_allocation(1.0, A);
  CHECK(a.n_opt == pin(pinned::n_opt_derived_1pfday));
  CHECK(a.predicted_loss == pin(pinned::loss_derived_1pfday));
  CHECK(a.d_processed == pin(pinned::d_traj_derived_1pfday));
  CHECK(a.b == pin(laws::critical_batch(a.predicted_loss, A)));
}

TEST_CASE("allocation invariants hold in both modes") {
  for (auto mode : {frontier::Mode::derived, frontier::Mode::empirical}) {
    for (double c : {1e-4, 1.0, 1e4}) {
      auto a = frontier::optimal_allocation(c, A, mode);
      double c_flops = c * arch::kFlopsPerPfDay;
      CHECK(6.0 * a.n_opt * a.b * a.s_min ==
            doctest::Approx(2.0 * c_flops).epsilon(1e-12));
      CHECK(a.d_processed == doctest::Approx(a.b * a.s_min).epsilon(1e-12));
      CHECK(a.b == doctest::Approx(laws::critical_batch(a.predicted_loss, A)).epsilon(1e-12));
      CHECK(a.c_min == c);
    }
  }
  CHECK_THROWS_AS(frontier::optimal_allocation(0.0, A), std::invalid_argument);
}

TEST_CASE("efficient training sits ten percent above the converged loss") {
  for (double c : {1e-2, 1.0, 1e2}) {
    auto a = frontier::optimal_allocation(c, A);
    double converged = laws::loss_of_n(a.n_opt, A);
    CHECK(a.predicted_loss / converged ==
          doctest::Approx(1.0 + A.alpha_N / A.alpha_S).epsilon(1e-12));
  }
}

TEST_CASE("closed-form frontier matches brute-force minimization") {
  for (double c : {1e-4, 1e-2, 1.0, 1e2, 1e4}) {
    auto a = frontier::optimal_allocation(c, A);
    double n_brute = brute_force_n_opt(c, A, a.n_opt);
    CHECK(a.n_opt == doctest::Approx(n_brute).epsilon(1e-4));
    CHECK(a.predicted_loss == doctest::Approx(loss_at(n_brute, c, A)).epsilon(1e-6));
  }
}

TEST_CASE("frontier outputs are pure power laws of the budget") {
  auto at = [](double c) { return frontier::optimal_allocation(c, A); };
  double n_ratio = at(1e-3).n_opt / at(1e-4).n_opt;
  double l_ratio = at(1e-3).predicted_loss / at(1e-4).predicted_loss;
  for (double c = 1e-4; c < 1e4; c *= 10.0) {
    CHECK(at(10 * c).n_opt / at(c).n_opt == doctest::Approx(n_ratio).epsilon(1e-8));
    CHECK(at(10 * c).predicted_loss / at(c).predicted_loss ==
          doctest::Approx(l_ratio).epsilon(1e-8));
  }
  auto e = frontier::derived_exponents(A);
  CHECK(n_ratio == doctest::Approx(std::pow(10.0, e.p_n)).epsilon(1e-10));
  CHECK(l_ratio == doctest::Approx(std::pow(10.0, -e.alpha_c)).epsilon(1e-10));
}

TEST_CASE("compute scale of the derived frontier") {
  double cc = frontier::derived_compute_scale(A);
  CHECK(cc == pin(pinned::cc_derived_pfdays));
  CHECK(frontier::optimal_allocation(cc, A).predicted_loss ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("empirical mode follows the measured trends") {
  auto t = frontier::EmpiricalTrends::appendix_a();
  for (double c : {0.1, 1.0, 37.0}) {
    auto a = frontier::optimal_allocation(c, A, frontier::Mode::empirical);
    CHECK(a.n_opt == pin(t.n_e * std::pow(c, t.p_n)));
    CHECK(a.predicted_loss == pin(laws::loss_of_cmin(c, A)));
  }
  auto unit = frontier::optimal_allocation(1.0, A, frontier::Mode::empirical);
  CHECK(unit.b == doctest::Approx(t.b_e).epsilon(0.02));
}

TEST_CASE("allocation with a refitted learning-curve surface") {
  laws::LossNSConstants same{A.alpha_N, A.alpha_S, A.N_c, A.S_c};
  auto base = frontier::optimal_allocation(3.0, A);
  auto with_surface = frontier::optimal_allocation(3.0, A, same);
  CHECK(with_surface.n_opt == doctest::Approx(base.n_opt).epsilon(1e-12));
  CHECK(with_surface.predicted_loss == doctest::Approx(base.predicted_loss).epsilon(1e-12));

  auto other = frontier::optimal_allocation(3.0, A, laws::LossNSConstants::table_3());
  CHECK(other.n_opt != doctest::Approx(base.n_opt).epsilon(1e-6));
  double c_flops = 3.0 * arch::kFlopsPerPfDay;
  CHECK(6.0 * other.n_opt * other.b * other.s_min ==
        doctest::Approx(2.0 * c_flops).epsilon(1e-12));
}

TEST_CASE("efficient versus converged training") {
  auto r = frontier::efficient_vs_converged(0.10, 0.02, A);
  CHECK(r.n_ratio == pin(pinned::eff_n_ratio));
  CHECK(r.s_ratio == pin(pinned::eff_s_ratio));
  CHECK(r.c_ratio == pin(pinned::eff_c_ratio));
  CHECK(r.c_ratio == doctest::Approx(r.n_ratio * r.s_ratio).epsilon(1e-12));

  auto same = frontier::efficient_vs_converged(0.05, 0.05, A);
  CHECK(same.n_ratio == pin(1.0));
  CHECK(same.s_ratio == pin(1.0));
  CHECK(same.c_ratio == pin(1.0));

  auto more = frontier::efficient_vs_converged(0.20, 0.02, A);
  CHECK(more.n_ratio > r.n_ratio);
  CHECK(more.s_ratio < r.s_ratio);
}

TEST_CASE("overhead of training off-size models") {
  auto big = frontier::suboptimal_overhead(2.2, A);
  CHECK(big.compute_overhead == pin(pinned::subopt_22_compute));
  CHECK(big.step_ratio == pin(pinned::subopt_22_steps));

  auto small = frontier::suboptimal_overhead(0.6, A);
  CHECK(small.compute_overhead == pin(pinned::subopt_06_compute));
  CHECK(small.step_ratio == pin(pinned::subopt_06_steps));
  CHECK(small.compute_overhead <= 1.20);

  auto exact = frontier::suboptimal_overhead(1.0, A);
  CHECK(exact.compute_overhead == pin(1.0));
  CHECK(exact.step_ratio == pin(1.0));

  for (double ratio = 0.35; ratio < 8.0; ratio *= 1.17) {
    if (std::abs(ratio - 1.0) < 1e-12) continue;
    CHECK(frontier::suboptimal_overhead(ratio, A).compute_overhead > 1.0);
  }
}

TEST_CASE("undersized models hit a hard feasibility floor") {
  double floor = frontier::min_feasible_size_ratio(A);
  CHECK(floor == pin(pinned::min_feasible_ratio));
  CHECK_NOTHROW(frontier::suboptimal_overhead(floor * 1.001, A));
  CHECK_THROWS_AS(frontier::suboptimal_overhead(floor, A), InfeasibleSizeRatio);
  CHECK_THROWS_AS(frontier::suboptimal_overhead(floor * 0.5, A), InfeasibleSizeRatio);
  try {
    frontier::suboptimal_overhead(0.1, A);
  } catch (const InfeasibleSizeRatio& e) {
    CHECK(e.min_ratio == pin(pinned::min_feasible_ratio));
  }
}

TEST_CASE("one-epoch data trajectory") {
  CHECK(frontier::data_trajectory(1.0, A) == pin(pinned::d_traj_emp_1pfday));
  // Doubling the budget grows the dataset by 2^(1 - p_N).
  double growth = frontier::data_trajectory(2.0, A) / frontier::data_trajectory(1.0, A);
  CHECK(growth == pin(std::pow(2.0, 1.0 - 0.73)));
  CHECK(growth == doctest::Approx(1.20).epsilon(0.01));

  // Definitional identity with the empirical allocation.
  auto a = frontier::optimal_allocation(5.0, A, frontier::Mode::empirical);
  CHECK(frontier::data_trajectory(5.0, A) == doctest::Approx(a.d_processed).epsilon(1e-12));
}

TEST_CASE("overfitting-constrained data trajectory grows more slowly") {
  const auto& T2 = laws::LossNDConstants::table_2();
  auto t = frontier::EmpiricalTrends::appendix_a();
  double lo = frontier::overfit_data_trajectory(1.0, 0.02, T2);
  double hi = frontier::overfit_data_trajectory(10.0, 0.02, T2);
  double exponent = std::log10(hi / lo);
  CHECK(exponent == doctest::Approx(0.54).epsilon(0.01));
  CHECK(exponent < 1.0 - t.p_n + 0.3);  // slower than one-epoch growth

  // Cross-check against the dataset-size requirement at the trend model size.
  double n = t.n_e * std::pow(7.0, t.p_n);
  CHECK(frontier::overfit_data_trajectory(7.0, 0.02, T2) ==
        doctest::Approx(laws::data_requirement(n, 0.02, T2)).epsilon(1e-12));
}

TEST_CASE("budget where the data and compute frontiers collide") {
  auto x = frontier::intersection_point(A);
  REQUIRE(x.has_value());
  CHECK(x->c_star == pin(pinned::intersect_c_star));
  CHECK(x->n_star == pin(pinned::intersect_n_star));
  CHECK(x->d_star == pin(pinned::intersect_d_star));
  CHECK(x->l_star == pin(pinned::intersect_l_star));

  // The crossing lies on both laws and on the one-epoch trajectory.
  CHECK(laws::loss_of_cmin(x->c_star, A) == doctest::Approx(x->l_star).epsilon(1e-10));
  CHECK(laws::loss_of_d(x->d_star, A) == doctest::Approx(x->l_star).epsilon(1e-10));
  CHECK(frontier::data_trajectory(x->c_star, A) ==
        doctest::Approx(x->d_star).epsilon(1e-10));
}

TEST_CASE("parallel laws never intersect") {
  auto t = frontier::EmpiricalTrends::appendix_a();
  laws::ScalingConstants k = A;
  k.alpha_C_min = A.alpha_D * (1.0 - t.p_n);
  CHECK_FALSE(frontier::intersection_point(k).has_value());
}

TEST_CASE("the intersection is highly sensitive to the data exponent") {
  double base = frontier::intersection_point(A)->c_star;
  laws::ScalingConstants up = A, down = A;
  up.alpha_D = A.alpha_D + 0.005;
  down.alpha_D = A.alpha_D - 0.005;
  double c_up = frontier::intersection_point(up)->c_star;
  double c_down = frontier::intersection_point(down)->c_star;
  CHECK(std::max(base / c_up, c_up / base) > 2.0);
  CHECK(std::max(base / c_down, c_down / base) > 2.0);
}

TEST_CASE("frontier sweep and its CSV form") {
  std::vector<double> budgets = {0.1, 1.0, 10.0};
  auto sweep = frontier::frontier_sweep(budgets, A);
  REQUIRE(sweep.size() == 3);
  CHECK(sweep[1].n_opt == pin(pinned::n_opt_derived_1pfday));

  std::ostringstream out;
  frontier::sweep_to_csv(sweep, out);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "c_min,n_opt,b,s_min,d,loss");
  int rows = 0;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 3);
}
