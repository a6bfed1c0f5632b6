#include "catqec/states.hpp"

#include <cmath>

namespace catqec {

LogicalQubit::LogicalQubit(Complex g, Complex e) : c_g(g), c_e(e) {
  const double n = std::norm(c_g) + std::norm(c_e);
  if (std::abs(n - 1.0) > 1e-12)
    throw std::invalid_argument("logical amplitudes must have unit norm");
}

LogicalQubit LogicalQubit::from_bloch(double theta, double phi) {
  return LogicalQubit(std::cos(theta / 2.0),
                      std::exp(Complex(0.0, phi)) * std::sin(theta / 2.0));
}

std::array<LogicalQubit, 6> LogicalQubit::bloch_test_states() {
  const double s = 1.0 / std::sqrt(2.0);
  return {LogicalQubit(1.0, 0.0),
          LogicalQubit(0.0, 1.0),
          LogicalQubit(s, s),
          LogicalQubit(s, -s),
          LogicalQubit(s, Complex(0.0, s)),
          LogicalQubit(s, Complex(0.0, -s))};
}

CodeParams CodeParams::from_nbar(double nbar, double phase) {
  if (nbar < 0.0) throw std::invalid_argument("nbar must be non-negative");
  return CodeParams(std::sqrt(nbar) * std::exp(Complex(0.0, phase)));
}

StateVector coherent_state(Complex alpha, const HilbertConfig& cfg) {
  cfg.validate();
  if (!truncation_safe(alpha, cfg))
    throw TruncationError("coherent amplitude violates |a|^2 + 6|a| <= fock_dim");
  StateVector v(cfg.fock_dim);
  v(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < cfg.fock_dim; ++n)
    v(n) = v(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  v.normalize();
  return v;
}

StateVector cat_state(Complex alpha, int sign, const HilbertConfig& cfg) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("cat sign must be +1 or -1");
  if (sign == -1 && std::abs(alpha) < 1e-6)
    throw DegenerateCat("odd cat state vanishes as alpha -> 0");
  StateVector v = coherent_state(alpha, cfg) +
                  static_cast<double>(sign) * coherent_state(-alpha, cfg);
  v.normalize();
  return v;
}

StateVector logical_state(JumpIndex n, const CodeParams& code, const LogicalQubit& q,
                          const HilbertConfig& cfg) {
  const Complex a = code.alpha;
  const Complex ia = kImag * a;
  StateVector v;
  switch (n.n) {
    case 0:
      v = q.c_g * cat_state(a, +1, cfg) + q.c_e * cat_state(ia, +1, cfg);
      break;
    case 1:
      v = q.c_g * cat_state(a, -1, cfg) + kImag * q.c_e * cat_state(ia, -1, cfg);
      break;
    case 2:
      v = q.c_g * cat_state(a, +1, cfg) - q.c_e * cat_state(ia, +1, cfg);
      break;
    default:
      v = q.c_g * cat_state(a, -1, cfg) - kImag * q.c_e * cat_state(ia, -1, cfg);
      break;
  }
  v.normalize();
  return v;
}

std::pair<StateVector, JumpIndex> apply_photon_loss(JumpIndex n, const CodeParams& code,
                                                    const LogicalQubit& q,
                                                    const HilbertConfig& cfg) {
  const StateVector psi = logical_state(n, code, q, cfg);
  StateVector lowered(cfg.fock_dim);
  for (int k = 0; k + 1 < cfg.fock_dim; ++k)
    lowered(k) = std::sqrt(static_cast<double>(k + 1)) * psi(k + 1);
  lowered(cfg.fock_dim - 1) = 0.0;
  lowered.normalize();
  return {lowered, n.next()};
}

StateVector no_jump_damp(JumpIndex n, const CodeParams& code, const LogicalQubit& q,
                         double t_us, double kappa, const HilbertConfig& cfg) {
  if (t_us < 0.0) throw std::invalid_argument("duration must be non-negative");
  const CodeParams damped(code.alpha * std::exp(-0.5 * kappa * t_us));
  return logical_state(n, damped, q, cfg);
}

Eigen::Matrix4cd overlap_matrix(const CodeParams& code, const HilbertConfig& cfg) {
  cfg.validate();
  const std::array<Complex, 4> amps = {code.alpha, -code.alpha, kImag * code.alpha,
                                       -kImag * code.alpha};
  Eigen::Matrix4cd g;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) g(i, j) = coherent_overlap(amps[i], amps[j]);
  return g;
}

Complex coherent_overlap(Complex a, Complex b) {
  return std::exp(-0.5 * std::norm(a) - 0.5 * std::norm(b) + std::conj(a) * b);
}

}  // namespace catqec
