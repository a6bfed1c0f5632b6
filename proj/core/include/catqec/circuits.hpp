#pragma once

#include <cmath>

#include "catqec/config.hpp"
#include "catqec/dynamics.hpp"
#include "catqec/gates.hpp"
#include "catqec/states.hpp"

namespace catqec {

struct ZeroProbability : std::runtime_error {
  explicit ZeroProbability(const std::string& what) : std::runtime_error(what) {}
};

/// Inputs of the encode/decode/correct compilers. The damped quantities are
/// always recomputed from (alpha, kappa, T_w).
struct ProtocolParams {
  CodeParams code;
  double chi = 2.0 * kPi * 40.0;  // rad/us
  double kappa = 0.0;             // 1/us
  double tw_us = 0.0;
  double t_sel_us = 0.054;

  Complex alpha_prime() const { return code.alpha * std::exp(-0.5 * kappa * tw_us); }
  double nbar_prime() const { return std::norm(alpha_prime()); }
  Complex beta_prime() const { return alpha_prime() * Complex(-1.0, 1.0); }
  Complex beta_prime_d() const { return 0.5 * (beta_prime() - code.beta()); }

  double half_pi_wait_us() const { return kPi / (2.0 * chi); }
  double pi_wait_us() const { return kPi / chi; }

  static ProtocolParams from_config(const ExperimentConfig& config);
};

struct CycleReport {
  int cycle;
  double time_us;
  double fidelity;
  double purity;
  double parity;
};

/// Maps (c_g|g> + c_e|e>) (x) |0>  to  |g> (x) (c_g C+_a + c_e C+_{ia}).
PulseSequence build_encode(const ProtocolParams& p);

/// Inverse mapping, back onto the qubit with the cavity left in vacuum.
PulseSequence build_decode(const ProtocolParams& p);

/// Entropy transfer to the qubit, mid-sequence qubit reset, energy re-pump
/// and re-encoding; maps both psi^(0) and psi^(1) at the damped amplitude
/// back to psi^(0) at full amplitude.
PulseSequence build_correct(const ProtocolParams& p);

/// Measurement-conditioned variant without the reset: the known jump count
/// replaces the reset by a deterministic qubit unrotation (applied to each
/// coherent component through a displacement round trip), plus a selective
/// 2pi phase flip for c in {2,3}.
PulseSequence build_correct_mbqec(const ProtocolParams& p, int c_mod4);

/// Ideal projective QND parity measurement with projectors I (x) (I +- Pi)/2.
std::pair<int, JointState> parity_measure(const JointState& state, Rng& rng);
std::pair<int, JointState> parity_measure(const JointState& state, uint64_t seed);
std::pair<int, StateVector> parity_measure_pure(const StateVector& psi, Rng& rng,
                                                const HilbertConfig& cfg);

struct AqecOptions {
  LogicalQubit logical{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
  bool corrections_enabled = true;
  /// Waits and pulse windows via the exact dispersive propagator (default) or
  /// the generic adaptive integrator.
  bool use_exact_dispersive = true;
  IntegratorSettings integrator;
  /// Decode after the last cycle and write the fidelity of the recovered
  /// qubit state into *final_decode_fidelity.
  double* final_decode_fidelity = nullptr;
};

/// Stroboscopic wait/correct loop on the full density matrix. One report per
/// cycle, taken right after the correction sequence.
std::vector<CycleReport> run_aqec(const ExperimentConfig& config,
                                  const AqecOptions& options = {});

struct MbqecEpochStats {
  int cycle;
  double time_us;
  double mean_fidelity;
  double stderr_fidelity;
};

struct MbqecResult {
  std::vector<MbqecEpochStats> epochs;
  /// Cavity jumps during the first waiting window, one entry per trajectory.
  std::vector<int> first_wait_jumps;
  double mean_first_wait_jumps = 0.0;
  int n_trajectories = 0;
};

struct MbqecOptions {
  LogicalQubit logical{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
  int n_threads = 0;  // 0 = hardware concurrency
};

/// Trajectory ensemble with stroboscopic parity measurements and
/// jump-count-conditioned corrections.
MbqecResult run_mbqec(const ExperimentConfig& config, int n_trajectories,
                      const MbqecOptions& options = {});

}  // namespace catqec
