#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace catqec {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

inline constexpr Complex kImag{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

struct TruncationError : std::runtime_error {
  explicit TruncationError(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionError : std::invalid_argument {
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

struct StateInvariantError : std::runtime_error {
  explicit StateInvariantError(const std::string& what) : std::runtime_error(what) {}
};

/// Truncated qubit (x) cavity space. The qubit factor always comes first,
/// so a joint basis index is q * fock_dim + n with q in {0=g, 1=e}.
struct HilbertConfig {
  int fock_dim = 70;
  static constexpr int qubit_dim = 2;

  int joint_dim() const { return qubit_dim * fock_dim; }

  void validate() const {
    if (fock_dim < 2) throw DimensionError("fock_dim must be >= 2");
  }
};

// Amplitudes with |a|^2 + 6|a| beyond the truncation are rejected; coherent
// tails decay super-exponentially past nbar + 6*sqrt(nbar).
inline bool truncation_safe(Complex alpha, const HilbertConfig& cfg) {
  const double a = std::abs(alpha);
  return a * a + 6.0 * a <= static_cast<double>(cfg.fock_dim);
}

/// Joint qubit-cavity state, either a pure vector or a density matrix.
class JointState {
 public:
  JointState() = default;

  static JointState pure(StateVector psi, double time_us = 0.0);
  static JointState density(Eigen::MatrixXcd rho, double time_us = 0.0);

  bool is_pure() const { return pure_; }
  int dim() const { return pure_ ? static_cast<int>(psi_.size()) : static_cast<int>(rho_.rows()); }

  const StateVector& vector() const;       // pure representation only
  const Eigen::MatrixXcd& matrix() const;  // density representation only

  /// Density matrix view; promotes a pure state to |psi><psi| on demand.
  Eigen::MatrixXcd to_density_matrix() const;
  /// Irreversibly switch to the density representation.
  void promote_to_density();

  double time_us = 0.0;

  /// Checks norm / Hermiticity / trace / positivity within the documented
  /// tolerances and throws StateInvariantError on violation.
  void validate() const;

  double norm() const;
  double purity() const;

 private:
  bool pure_ = true;
  StateVector psi_;
  Eigen::MatrixXcd rho_;
};

// --- factor-space operator constructors ------------------------------------

/// <n-1|a|n> = sqrt(n) on the cavity factor.
Operator annihilation(const HilbertConfig& cfg);

/// a^dag a, diagonal.
Operator number_operator(const HilbertConfig& cfg);

/// Photon-number parity exp(i pi a^dag a) = diag((-1)^n).
Operator parity_operator(const HilbertConfig& cfg);

/// Displacement exp(alpha a^dag - conj(alpha) a) by exact exponentiation of
/// the truncated generator. Throws TruncationError when alpha is unsafe.
Operator displacement_operator(Complex alpha, const HilbertConfig& cfg);

// Qubit factor operators, basis (|g>, |e>).
Operator qubit_identity();
Operator sigma_z();      // |e><e| - |g><g|
Operator sigma_minus();  // |g><e|
Operator qubit_projector_g();
Operator qubit_projector_e();

Operator cavity_identity(const HilbertConfig& cfg);
Operator joint_identity(const HilbertConfig& cfg);

/// Kronecker product, qubit factor first.
Operator tensor(const Operator& qubit_op, const Operator& cavity_op);

/// |q> (x) |cavity>, qubit factor first.
StateVector tensor_state(const Eigen::Vector2cd& qubit, const StateVector& cavity);

enum class Keep { qubit, cavity };

Eigen::MatrixXcd partial_trace(const JointState& state, Keep keep);

/// <target|rho|target> for densities, |<target|psi>|^2 for pure states.
double fidelity(const JointState& state, const StateVector& target);
double fidelity(const JointState& state, const JointState& target);

double state_overlap_sq(const StateVector& a, const StateVector& b);

/// (1/2) tr |A - B| for Hermitian A, B.
double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

double expectation(const JointState& state, const Operator& op);

/// exp(G) for anti-Hermitian G, via the eigendecomposition of iG. The result
/// is unitary to rounding on the truncated space.
Operator exp_antihermitian(const Operator& generator);

}  // namespace catqec
