#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "catqec/hilbert.hpp"
#include "catqec/rng.hpp"

namespace catqec {

struct StepSizeUnderflow : std::runtime_error {
  explicit StepSizeUnderflow(const std::string& what) : std::runtime_error(what) {}
};

/// Cavity decay plus qubit relaxation/dephasing. The collapse set is
///   sqrt(kappa) (I x a),  sqrt(1/T1) (sigma- x I),  sqrt(1/(2 Tphi)) (sigma_z x I)
/// with 1/Tphi = 1/T2 - 1/(2 T1).
struct NoiseModel {
  double kappa = 0.0;  // 1/us
  double t1_us = std::numeric_limits<double>::infinity();
  double t2_us = std::numeric_limits<double>::infinity();

  static NoiseModel none() { return {}; }
  static NoiseModel from_times(double tcav_us, double t1_us, double t2_us);

  double gamma1() const { return std::isinf(t1_us) ? 0.0 : 1.0 / t1_us; }
  double tphi_us() const;
  double gamma_phi() const;  // rate of the sigma_z collapse operator squared
  bool is_zero() const;

  /// Dense collapse operators on the joint space, for the generic integrator.
  std::vector<Operator> collapse_operators(const HilbertConfig& cfg) const;
};

struct IntegratorSettings {
  enum class Method { adaptive_rk, fixed_rk4 };
  Method method = Method::adaptive_rk;
  double rel_tol = 1e-9;
  double abs_tol = 1e-11;
  double max_step_us = 1.0;
};

/// Times (strictly increasing) and collapse-channel indices of the jumps
/// realized along one trajectory. Channels: 0 = cavity a, 1 = sigma-,
/// 2 = sigma_z.
struct JumpRecord {
  struct Event {
    double time_us;
    int channel;
  };
  std::vector<Event> events;

  int count(int channel) const;
};

/// H = -chi |e><e| (x) a^dag a on the joint space.
Operator dispersive_hamiltonian(double chi, const HilbertConfig& cfg);

/// Lindblad evolution d rho/dt = -i[H, rho] + sum_k D[L_k] rho over the given
/// duration. H may be any joint operator; diagonal H gets a cheap path.
JointState evolve_master(const JointState& rho, const Operator& hamiltonian,
                         const NoiseModel& noise, double duration_us,
                         const IntegratorSettings& settings, const HilbertConfig& cfg);

/// One term of a cavity density expressed as sum_jk w_jk |a_j><a_k|.
struct CoherentComponent {
  Complex weight;
  Complex ket_amp;
  Complex bra_amp;
};

/// Exact pure-loss update: amplitudes damp by exp(-kappa t/2) and each weight
/// picks up exp[(a_j conj(a_k) - (|a_j|^2+|a_k|^2)/2)(1 - exp(-kappa t))].
std::vector<CoherentComponent> damp_superposition_closed_form(
    std::vector<CoherentComponent> components, double t_us, double kappa);

/// Assemble the cavity density matrix of a coherent superposition.
Eigen::MatrixXcd components_to_density(const std::vector<CoherentComponent>& components,
                                       const HilbertConfig& cfg);

/// Monte-Carlo wave function unraveling: non-Hermitian drift
/// H - (i/2) sum L^dag L with norm-decay jump sampling. Reproducible per seed.
std::pair<JointState, JumpRecord> evolve_trajectory(const JointState& psi,
                                                    const Operator& hamiltonian,
                                                    const NoiseModel& noise,
                                                    double duration_us, uint64_t seed,
                                                    const HilbertConfig& cfg);

/// Exact propagator for the dispersive Hamiltonian with the standard collapse
/// set. Per qubit block the Fock-ladder cascade of pure loss has a closed
/// form; conditional phases, the T1 feed from the e to the g block, and all
/// dephasing factors enter as exact scalar factors per ladder. Cost per
/// application is O(fock_dim^2 * cascade depth), independent of the duration.
class DispersivePropagator {
 public:
  DispersivePropagator(double chi, const NoiseModel& noise, const HilbertConfig& cfg);

  /// Advance a density state in place. hamiltonian_on toggles the -chi|e><e|n
  /// term (off models evolution with the dispersive shift suspended).
  void advance(JointState& state, double duration_us, bool hamiltonian_on = true) const;

  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho, double duration_us,
                         bool hamiltonian_on = true) const;

  double chi() const { return chi_; }
  const NoiseModel& noise() const { return noise_; }

 private:
  double chi_;
  NoiseModel noise_;
  HilbertConfig cfg_;
};

/// Trajectory stepper for diagonal effective Hamiltonians (the protocol
/// case). No-jump segments are solved analytically: every component evolves
/// as exp((i s_j - r_j/2) t) and the squared norm is a sum of decaying
/// exponentials whose root gives the jump time.
class DiagonalTrajectoryStepper {
 public:
  DiagonalTrajectoryStepper(double chi, const NoiseModel& noise, const HilbertConfig& cfg);

  /// Evolve psi over the duration, sampling jumps with rng. Jump events are
  /// appended to record (if non-null) with times offset by time_origin_us.
  void advance(StateVector& psi, double duration_us, bool hamiltonian_on, Rng& rng,
               JumpRecord* record = nullptr, double time_origin_us = 0.0) const;

 private:
  void apply_jump(StateVector& psi, int channel) const;

  double chi_;
  NoiseModel noise_;
  HilbertConfig cfg_;
};

}  // namespace catqec
