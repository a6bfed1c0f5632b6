#include <doctest.h>

#include <cmath>

#include "catqec/analysis.hpp"
#include "catqec/states.hpp"

using namespace catqec;

namespace {

// independent brute-force oracle: direct series summation to m = 60
std::array<double, 4> poisson_mod4_oracle(double eps) {
  std::array<double, 4> p{};
  double term = std::exp(-eps);
  for (int m = 0; m <= 60; ++m) {
    p[m % 4] += term;
    term *= eps / (m + 1);
  }
  return p;
}

}  // namespace

TEST_CASE("mod-4 Poisson probabilities") {
  SUBCASE("zero rate") {
    const JumpStats s = poisson_mod4(0.0);
    CHECK(s.p[0] == 1.0);
    CHECK(s.p[1] == 0.0);
    CHECK(s.p[2] == 0.0);
    CHECK(s.p[3] == 0.0);
  }

  SUBCASE("matches the brute-force series to 1e-12") {
    for (const double eps : {0.01, 0.1312, 0.5, 1.0, 2.7, 5.0}) {
      const JumpStats s = poisson_mod4(eps);
      const auto oracle = poisson_mod4_oracle(eps);
      for (int k = 0; k < 4; ++k) CHECK(std::abs(s.p[k] - oracle[k]) < 1e-12);
    }
  }

  SUBCASE("headline waiting window") {
    const JumpStats s = poisson_mod4(0.1312);
    // frozen from the brute-force oracle
    CHECK(s.p[1] == doctest::Approx(0.115068).epsilon(1e-4));
    // the small-eps approximant errs at O(eps^3)
    CHECK(std::abs(s.p[1] - s.approx_p1) < 3e-3);
    CHECK(std::abs(s.p[0] - s.approx_p0) < 3e-3);
  }

  SUBCASE("normalization for eps in [0, 5]") {
    for (double eps = 0.0; eps <= 5.0; eps += 0.25) {
      const JumpStats s = poisson_mod4(eps);
      CHECK(std::abs(s.p[0] + s.p[1] + s.p[2] + s.p[3] - 1.0) < 1e-12);
      for (int k = 0; k < 4; ++k) CHECK(s.p[k] >= 0.0);
    }
  }
}

TEST_CASE("waiting-window channel on the mod-4 weights") {
  const double eps = 0.1312;
  const double kappa_tw = 5e-4 * 65.6;

  SUBCASE("zero rate only damps the amplitude") {
    ModeWeights w;
    w.alpha = 2.0;
    const ModeWeights out = kraus_wait(w, 0.0, kappa_tw);
    CHECK(out.w[0] == 1.0);
    CHECK(std::abs(out.alpha - 2.0 * std::exp(-0.5 * kappa_tw)) < 1e-15);
  }

  SUBCASE("pure psi0 spreads by the Poisson weights") {
    ModeWeights w;
    w.alpha = 2.0;
    const ModeWeights out = kraus_wait(w, eps, kappa_tw);
    const JumpStats s = poisson_mod4(eps);
    for (int k = 0; k < 4; ++k) CHECK(out.w[k] == doctest::Approx(s.p[k]).epsilon(1e-14));
  }

  SUBCASE("two windows compose like one at twice the rate") {
    ModeWeights w;
    w.w = {0.7, 0.2, 0.05, 0.05};
    w.alpha = 2.0;
    const ModeWeights twice = kraus_wait(kraus_wait(w, eps, kappa_tw), eps, kappa_tw);
    const ModeWeights once = kraus_wait(w, 2.0 * eps, 2.0 * kappa_tw);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(twice.w[k] - once.w[k]) < 1e-12);
    CHECK(std::abs(twice.alpha - once.alpha) < 1e-15);
  }

  SUBCASE("normalization and cyclic covariance") {
    ModeWeights w;
    w.w = {0.4, 0.3, 0.2, 0.1};
    const ModeWeights out = kraus_wait(w, eps, kappa_tw);
    CHECK(std::abs(out.w[0] + out.w[1] + out.w[2] + out.w[3] - 1.0) < 1e-12);
    ModeWeights shifted;
    shifted.w = {w.w[3], w.w[0], w.w[1], w.w[2]};
    const ModeWeights out_shifted = kraus_wait(shifted, eps, kappa_tw);
    for (int k = 0; k < 4; ++k)
      CHECK(std::abs(out_shifted.w[(k + 1) % 4] - out.w[k]) < 1e-14);
  }
}

TEST_CASE("predicted AQEC fidelity") {
  CorrectionBudget budget;
  budget.epsilon_correct = 0.0077;
  budget.epsilon_jump = 0.1312;
  budget.tc_us = 0.519;
  budget.tw_us = 65.6;

  SUBCASE("no cycles means no decay") {
    CHECK(predicted_fidelity(0, budget).fidelity == 1.0);
    CHECK(predicted_fidelity(0, budget).t_us == 0.0);
  }

  SUBCASE("ten cycles of the headline budget") {
    const FidelityPrediction p = predicted_fidelity(10, budget);
    const double per = (1.0 - 0.0077) * (1.0 - 0.5 * 0.1312 * 0.1312);
    CHECK(p.fidelity == doctest::Approx(std::pow(per, 10)).epsilon(1e-14));
    CHECK(p.fidelity == doctest::Approx(0.8490).epsilon(2e-3));
    CHECK(p.t_us == doctest::Approx(10.0 * 66.119));
  }

  SUBCASE("monotone decreasing in every argument") {
    const double f1 = predicted_fidelity(10, budget).fidelity;
    CHECK(predicted_fidelity(11, budget).fidelity < f1);
    CorrectionBudget worse = budget;
    worse.epsilon_correct *= 1.5;
    CHECK(predicted_fidelity(10, worse).fidelity < f1);
    worse = budget;
    worse.epsilon_jump *= 1.5;
    CHECK(predicted_fidelity(10, worse).fidelity < f1);
  }
}

TEST_CASE("effective decay rate") {
  CorrectionBudget budget;
  budget.epsilon_correct = 0.0077;
  budget.tw_us = 65.6;
  const double kappa = 5e-4;
  const double nbar = 4.0;

  SUBCASE("headline numbers") {
    const EffectiveDecay d = effective_decay(budget, kappa, nbar);
    CHECK(d.optimal_tw_us == doctest::Approx(62.048).epsilon(1e-4));
    CHECK(d.kappa_eff_at_optimum == doctest::Approx(2.48193e-4).epsilon(1e-4));
    CHECK(1.0 / d.kappa_eff_at_optimum == doctest::Approx(4029.0).epsilon(1e-3));
    // improvement factor over the uncorrected kappa nbar
    CHECK(d.kappa_eff_at_optimum / (kappa * nbar) ==
          doctest::Approx(std::sqrt(2.0 * 0.0077)).epsilon(1e-12));
  }

  SUBCASE("perfect gates give vanishing decay") {
    CorrectionBudget tiny = budget;
    tiny.epsilon_correct = 1e-12;
    CHECK(effective_decay(tiny, kappa, nbar).kappa_eff_at_optimum < 1e-6);
  }

  SUBCASE("convex in the waiting time, minimum at the analytic optimum") {
    auto kappa_eff_at = [&](double tw) {
      CorrectionBudget b = budget;
      b.tw_us = tw;
      b.epsilon_jump = kappa * tw * nbar;
      return effective_decay(b, kappa, nbar).kappa_eff;
    };
    // convexity on a grid
    for (double tw = 10.0; tw <= 200.0; tw += 5.0) {
      const double mid = kappa_eff_at(tw + 5.0);
      CHECK(2.0 * mid <= kappa_eff_at(tw) + kappa_eff_at(tw + 10.0) + 1e-15);
    }
    // golden-section search oracle
    double lo = 5.0, hi = 300.0;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = hi - gr * (hi - lo), b = lo + gr * (hi - lo);
    for (int it = 0; it < 200; ++it) {
      if (kappa_eff_at(a) < kappa_eff_at(b)) hi = b;
      else lo = a;
      a = hi - gr * (hi - lo);
      b = lo + gr * (hi - lo);
    }
    const double numeric_opt = 0.5 * (lo + hi);
    const double analytic_opt = effective_decay(budget, kappa, nbar).optimal_tw_us;
    CHECK(std::abs(numeric_opt - analytic_opt) / analytic_opt < 1e-6);
  }
}

TEST_CASE("lifetime fitting") {
  SUBCASE("recovers an exact exponential") {
    std::vector<std::pair<double, double>> series;
    for (int k = 1; k <= 12; ++k)
      series.emplace_back(50.0 * k, std::exp(-50.0 * k / 1000.0));
    const LifetimeFit fit = fit_lifetime(series);
    CHECK(fit.t_eff_us == doctest::Approx(1000.0).epsilon(1e-3));
    CHECK(fit.residual_rms < 1e-12);
  }

  SUBCASE("constant series reports an infinite lifetime") {
    std::vector<std::pair<double, double>> series;
    for (int k = 1; k <= 8; ++k) series.emplace_back(10.0 * k, 1.0);
    const LifetimeFit fit = fit_lifetime(series);
    CHECK(std::isinf(fit.t_eff_us));
  }

  SUBCASE("refuses garbage") {
    std::vector<std::pair<double, double>> series;
    for (int k = 1; k <= 10; ++k)
      series.emplace_back(10.0 * k, (k % 2 == 0) ? 0.9 : 0.3);
    CHECK_THROWS_AS(fit_lifetime(series), FitDiverged);
    CHECK_THROWS(fit_lifetime({{1.0, 0.5}, {2.0, 0.4}}));  // too few points
  }
}

TEST_CASE("Husimi-Q grids") {
  const HilbertConfig cfg{70};
  GridSpec grid;
  grid.re_min = grid.im_min = -4.0;
  grid.re_max = grid.im_max = 4.0;
  grid.n_re = grid.n_im = 81;

  SUBCASE("vacuum peaks at 1/pi at the origin") {
    const StateVector vac = coherent_state(0.0, cfg);
    const Eigen::MatrixXd q = phase_space_grid(vac * vac.adjoint(), grid);
    int mi, mj;
    q.maxCoeff(&mi, &mj);
    CHECK(grid.re_at(mj) == doctest::Approx(0.0));
    CHECK(grid.im_at(mi) == doctest::Approx(0.0));
    CHECK(q(mi, mj) == doctest::Approx(1.0 / kPi).epsilon(1e-10));
  }

  SUBCASE("coherent state peaks at its amplitude") {
    const StateVector a = coherent_state(2.0, cfg);
    const Eigen::MatrixXd q = phase_space_grid(a * a.adjoint(), grid);
    int mi, mj;
    q.maxCoeff(&mi, &mj);
    CHECK(std::abs(grid.re_at(mj) - 2.0) <= 0.11);
    CHECK(std::abs(grid.im_at(mi)) <= 0.11);
  }

  SUBCASE("even cat has two equal peaks") {
    const StateVector cat = cat_state(2.0, +1, cfg);
    const Eigen::MatrixXd q = phase_space_grid(cat * cat.adjoint(), grid);
    // values at +-2 agree to 1e-10 and dominate the grid
    const int at_p = 60;  // re = +2 with these bounds
    const int at_m = 20;  // re = -2
    const int mid = 40;
    CHECK(grid.re_at(at_p) == doctest::Approx(2.0));
    CHECK(grid.re_at(at_m) == doctest::Approx(-2.0));
    CHECK(std::abs(q(mid, at_p) - q(mid, at_m)) < 1e-10);
    CHECK(q(mid, at_p) > 10.0 * q(mid, mid));
  }

  SUBCASE("values stay within the Husimi bound") {
    const StateVector cat = cat_state(1.5, -1, cfg);
    const Eigen::MatrixXd q = phase_space_grid(cat * cat.adjoint(), grid);
    CHECK(q.minCoeff() >= 0.0);
    CHECK(q.maxCoeff() <= 1.0 / kPi + 1e-12);
  }
}
