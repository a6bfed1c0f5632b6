#pragma once

#include <array>
#include <utility>

#include "catqec/hilbert.hpp"

namespace catqec {

struct DegenerateCat : std::invalid_argument {
  explicit DegenerateCat(const std::string& what) : std::invalid_argument(what) {}
};

/// Logical qubit amplitudes c_g|g> + c_e|e>, unit norm.
struct LogicalQubit {
  Complex c_g{1.0, 0.0};
  Complex c_e{0.0, 0.0};

  LogicalQubit() = default;
  LogicalQubit(Complex g, Complex e);

  Eigen::Vector2cd vector() const { return {c_g, c_e}; }

  static LogicalQubit from_bloch(double theta, double phi);
  /// +z, -z, +x, -x, +y, -y
  static std::array<LogicalQubit, 6> bloch_test_states();
};

/// One instance of the four-component cat code. nbar and beta are derived
/// from alpha and never stored.
struct CodeParams {
  Complex alpha{2.0, 0.0};

  CodeParams() = default;
  explicit CodeParams(Complex a) : alpha(a) {}
  static CodeParams from_nbar(double nbar, double phase = 0.0);

  double nbar() const { return std::norm(alpha); }
  Complex beta() const { return alpha * Complex(-1.0, 1.0); }
};

/// Jump counter living on Z/4.
struct JumpIndex {
  int n = 0;

  JumpIndex() = default;
  explicit JumpIndex(int k) : n(((k % 4) + 4) % 4) {}
  JumpIndex next() const { return JumpIndex(n + 1); }
  int parity_sign() const { return (n % 2 == 0) ? 1 : -1; }
  bool operator==(const JumpIndex&) const = default;
};

/// Normalized Fock expansion of |alpha>.
StateVector coherent_state(Complex alpha, const HilbertConfig& cfg);

/// N(|alpha> + sign |-alpha>), unit norm. Throws DegenerateCat for the odd
/// cat at alpha ~ 0.
StateVector cat_state(Complex alpha, int sign, const HilbertConfig& cfg);

/// The four logical family members:
///   n=0:  c_g C+_a + c_e C+_{ia}
///   n=1:  c_g C-_a + i c_e C-_{ia}
///   n=2:  c_g C+_a - c_e C+_{ia}
///   n=3:  c_g C-_a - i c_e C-_{ia}
/// renormalized to unit norm (the cat components are only quasi-orthogonal).
StateVector logical_state(JumpIndex n, const CodeParams& code, const LogicalQubit& q,
                          const HilbertConfig& cfg);

/// a|psi^(n)> / ||.|| together with the incremented jump index.
std::pair<StateVector, JumpIndex> apply_photon_loss(JumpIndex n, const CodeParams& code,
                                                    const LogicalQubit& q,
                                                    const HilbertConfig& cfg);

/// No-jump branch over a time t: alpha -> alpha exp(-kappa t / 2).
StateVector no_jump_damp(JumpIndex n, const CodeParams& code, const LogicalQubit& q,
                         double t_us, double kappa, const HilbertConfig& cfg);

/// Gram matrix of (|a>, |-a>, |ia>, |-ia>).
Eigen::Matrix4cd overlap_matrix(const CodeParams& code, const HilbertConfig& cfg);

/// Closed-form coherent overlap <a|b> = exp(-|a|^2/2 - |b|^2/2 + conj(a) b).
Complex coherent_overlap(Complex a, Complex b);

}  // namespace catqec
