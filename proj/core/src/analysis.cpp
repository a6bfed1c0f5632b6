#include "catqec/analysis.hpp"

#include <cmath>

namespace catqec {

JumpStats poisson_mod4(double epsilon) {
  if (epsilon < 0.0) throw std::invalid_argument("epsilon must be non-negative");
  JumpStats stats;
  stats.epsilon_jump = epsilon;
  const double e0 = std::exp(-epsilon);
  double term = e0;  // e^-eps eps^m / m! at m = 0
  double bound = 1.0;  // eps^m / m!, the remainder bound for the next tail
  int m = 0;
  while (true) {
    stats.p[m % 4] += term;
    ++m;
    term *= epsilon / m;
    bound *= epsilon / m;
    if (bound < 1e-15 && m > epsilon) break;
    if (m > 10000) break;
  }
  stats.approx_p0 = 1.0 - epsilon + 0.5 * epsilon * epsilon;
  stats.approx_p1 = epsilon - epsilon * epsilon;
  stats.approx_p23 = 0.5 * epsilon * epsilon;
  return stats;
}

ModeWeights kraus_wait(const ModeWeights& weights, double epsilon, double kappa_tw) {
  const JumpStats stats = poisson_mod4(epsilon);
  ModeWeights out;
  out.w = {0.0, 0.0, 0.0, 0.0};
  for (int n = 0; n < 4; ++n)
    for (int k = 0; k < 4; ++k) out.w[(n + k) % 4] += weights.w[n] * stats.p[k];
  out.alpha = weights.alpha * std::exp(-0.5 * kappa_tw);
  return out;
}

FidelityPrediction predicted_fidelity(int n_cycles, const CorrectionBudget& budget) {
  if (n_cycles < 0) throw std::invalid_argument("cycle count must be non-negative");
  const double per_cycle = (1.0 - budget.epsilon_correct) * (1.0 - budget.epsilon_wait());
  return {std::pow(per_cycle, n_cycles),
          static_cast<double>(n_cycles) * (budget.tc_us + budget.tw_us)};
}

EffectiveDecay effective_decay(const CorrectionBudget& budget, double kappa, double nbar) {
  if (budget.epsilon_correct <= 0.0 || budget.epsilon_correct >= 1.0)
    throw std::invalid_argument("epsilon_correct must lie in (0,1)");
  if (kappa <= 0.0 || nbar <= 0.0)
    throw std::invalid_argument("kappa and nbar must be positive");
  EffectiveDecay out;
  const double ej = kappa * budget.tw_us * nbar;
  out.kappa_eff = (budget.epsilon_correct + 0.5 * ej * ej) / budget.tw_us;
  out.optimal_tw_us = std::sqrt(2.0 * budget.epsilon_correct) / (kappa * nbar);
  out.kappa_eff_at_optimum = kappa * nbar * std::sqrt(2.0 * budget.epsilon_correct);
  return out;
}

LifetimeFit fit_lifetime(const std::vector<std::pair<double, double>>& series) {
  if (series.size() < 5) throw std::invalid_argument("lifetime fit needs at least 5 points");
  for (const auto& [t, f] : series)
    if (f <= 0.0 || f > 1.0 + 1e-12)
      throw std::invalid_argument("fidelities must lie in (0, 1]");

  // linear regression of ln F on t
  const double n = static_cast<double>(series.size());
  double st = 0.0, sf = 0.0, stt = 0.0, stf = 0.0;
  for (const auto& [t, f] : series) {
    const double lf = std::log(f);
    st += t;
    sf += lf;
    stt += t * t;
    stf += t * lf;
  }
  const double denom = n * stt - st * st;
  if (denom <= 0.0) throw std::invalid_argument("degenerate time grid");
  const double slope = (n * stf - st * sf) / denom;
  const double intercept = (sf - slope * st) / n;

  LifetimeFit fit;
  fit.amplitude = std::exp(intercept);
  if (slope >= -1e-15) {
    fit.t_eff_us = std::numeric_limits<double>::infinity();
  } else {
    fit.t_eff_us = -1.0 / slope;
  }
  double ss = 0.0;
  for (const auto& [t, f] : series) {
    const double model = fit.amplitude * std::exp(slope * t);
    ss += (f - model) * (f - model);
  }
  fit.residual_rms = std::sqrt(ss / n);
  if (fit.residual_rms > 0.05)
    throw FitDiverged("lifetime fit residual exceeds 0.05");
  return fit;
}

Eigen::MatrixXd phase_space_grid(const Eigen::MatrixXcd& cavity_density,
                                 const GridSpec& grid) {
  if (cavity_density.rows() != cavity_density.cols())
    throw DimensionError("cavity density must be square");
  if (!std::isfinite(grid.re_min) || !std::isfinite(grid.re_max) ||
      !std::isfinite(grid.im_min) || !std::isfinite(grid.im_max))
    throw std::invalid_argument("grid bounds must be finite");
  const int nf = static_cast<int>(cavity_density.rows());
  Eigen::MatrixXd q(grid.n_im, grid.n_re);
  StateVector gamma_vec(nf);
  for (int j = 0; j < grid.n_im; ++j) {
    for (int i = 0; i < grid.n_re; ++i) {
      const Complex gamma(grid.re_at(i), grid.im_at(j));
      gamma_vec(0) = std::exp(-0.5 * std::norm(gamma));
      for (int n = 1; n < nf; ++n)
        gamma_vec(n) = gamma_vec(n - 1) * gamma / std::sqrt(static_cast<double>(n));
      const double val = (gamma_vec.dot(cavity_density * gamma_vec)).real() / kPi;
      q(j, i) = val;
    }
  }
  return q;
}

}  // namespace catqec
