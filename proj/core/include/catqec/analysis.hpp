#pragma once

#include <array>
#include <vector>

#include "catqec/hilbert.hpp"

namespace catqec {

struct FitDiverged : std::runtime_error {
  explicit FitDiverged(const std::string& what) : std::runtime_error(what) {}
};

/// Jump statistics of one waiting window: epsilon = kappa T_w nbar and the
/// mod-4 jump-count probabilities.
struct JumpStats {
  double epsilon_jump = 0.0;
  std::array<double, 4> p{};  // exact series sums
  // small-epsilon approximants: p0 ~ 1 - e + e^2/2, p1 ~ e - e^2, p2+p3 ~ e^2/2
  double approx_p0 = 0.0;
  double approx_p1 = 0.0;
  double approx_p23 = 0.0;
};

struct CorrectionBudget {
  double epsilon_correct = 0.0;
  double tc_us = 0.0;
  double tw_us = 0.0;
  double epsilon_jump = 0.0;

  double epsilon_wait() const { return 0.5 * epsilon_jump * epsilon_jump; }
};

/// p_k = sum_{m = k mod 4} e^{-eps} eps^m / m!, summed until the remainder
/// bound eps^M/M! drops below 1e-15.
JumpStats poisson_mod4(double epsilon);

/// Mod-4 weight vector of the logical family plus the damped amplitude tag.
struct ModeWeights {
  std::array<double, 4> w{1.0, 0.0, 0.0, 0.0};
  Complex alpha{0.0, 0.0};
};

/// Waiting-window channel at the mod-4 level: convolve the weights with the
/// Poisson probabilities and damp the amplitude tag.
ModeWeights kraus_wait(const ModeWeights& weights, double epsilon, double kappa_tw);

/// ((1 - eps_correct)(1 - eps_wait))^N and the elapsed time N (T_c + T_w).
struct FidelityPrediction {
  double fidelity;
  double t_us;
};
FidelityPrediction predicted_fidelity(int n_cycles, const CorrectionBudget& budget);

struct EffectiveDecay {
  double kappa_eff;             // at the supplied T_w, 1/us
  double optimal_tw_us;         // sqrt(2 eps_correct) / (kappa nbar)
  double kappa_eff_at_optimum;  // kappa nbar sqrt(2 eps_correct)
};
EffectiveDecay effective_decay(const CorrectionBudget& budget, double kappa, double nbar);

struct LifetimeFit {
  double t_eff_us;  // +inf for a flat series
  double amplitude;
  double residual_rms;
};

/// Least-squares fit of F(t) = A exp(-t / T_eff); throws FitDiverged when the
/// RMS residual exceeds 0.05.
LifetimeFit fit_lifetime(const std::vector<std::pair<double, double>>& series);

struct GridSpec {
  double re_min = -5.0;
  double re_max = 5.0;
  double im_min = -5.0;
  double im_max = 5.0;
  int n_re = 81;
  int n_im = 81;

  double re_at(int i) const {
    return n_re == 1 ? re_min : re_min + (re_max - re_min) * i / (n_re - 1);
  }
  double im_at(int j) const {
    return n_im == 1 ? im_min : im_min + (im_max - im_min) * j / (n_im - 1);
  }
};

/// Husimi Q(gamma) = <gamma|rho|gamma> / pi on the grid; rows index Im(gamma),
/// columns Re(gamma).
Eigen::MatrixXd phase_space_grid(const Eigen::MatrixXcd& cavity_density,
                                 const GridSpec& grid);

}  // namespace catqec
