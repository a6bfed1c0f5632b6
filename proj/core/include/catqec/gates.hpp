#pragma once

#include <string>
#include <vector>

#include "catqec/dynamics.hpp"
#include "catqec/hilbert.hpp"

namespace catqec {

/// One step of a pulse sequence. Displacements and resets are instantaneous;
/// conditional phases are realized by waiting under the dispersive shift;
/// selective rotations carry the published pulse duration.
struct GateStep {
  enum class Kind { displace, conditional_wait, selective_rotation, reset };

  Kind kind = Kind::displace;
  Complex amplitude{0.0, 0.0};  // displace
  double theta = 0.0;           // selective_rotation
  double eta = 0.0;             // selective_rotation
  double duration_us = 0.0;     // conditional_wait / selective_rotation

  static GateStep displace(Complex alpha) { return {Kind::displace, alpha, 0, 0, 0}; }
  static GateStep conditional_wait(double t_us) {
    return {Kind::conditional_wait, {}, 0, 0, t_us};
  }
  static GateStep selective_rotation(double theta, double eta, double duration_us) {
    return {Kind::selective_rotation, {}, theta, eta, duration_us};
  }
  static GateStep reset() { return {Kind::reset, {}, 0, 0, 0}; }
};

struct PulseSequence {
  std::vector<GateStep> steps;

  double total_duration_us() const;
  PulseSequence& operator+=(const PulseSequence& other);

  /// Line-oriented text form, one step per line:
  ///   D re,im | WAIT t_us | X0 theta,eta,dur_us | RESET
  std::string to_text() const;
  static PulseSequence from_text(const std::string& text);
};

struct GateModel {
  enum class Mode { noiseless_ideal, ideal_with_noise };
  enum class SelectivePhase { suspended, active };

  Mode mode = Mode::ideal_with_noise;
  SelectivePhase hamiltonian_during_selective = SelectivePhase::suspended;
  double reset_error = 0.0;  // probability of the qubit remaining in |e>
};

/// exp(i chi t |e><e| (x) a^dag a): waiting for pi/chi maps |e,a> -> |e,-a>
/// and leaves |g,a> unchanged.
Operator conditional_phase_unitary(double t_us, double chi, const HilbertConfig& cfg);

/// R(theta,eta) (x) |0><0| + I (x) (I - |0><0|) with
/// R = exp[(theta/2)(e^{i eta}|e><g| - e^{-i eta}|g><e|)].
Operator selective_rotation_unitary(double theta, double eta, const HilbertConfig& cfg);

/// rho -> |g><g| (x) tr_qubit(rho); with error_prob > 0 the qubit is left in
/// |e> with that probability instead.
JointState reset_channel(const JointState& state, double error_prob = 0.0);

struct ExecutionOptions {
  /// Evolve waits and pulse windows with the exact dispersive propagator;
  /// when false, the generic master-equation integrator is used instead.
  bool use_exact_dispersive = true;
  IntegratorSettings integrator;
};

/// A sequence with its displacement and rotation unitaries prebuilt, so loops
/// and trajectory ensembles do not re-exponentiate per step. Read-only after
/// construction and safe to share across threads.
struct CompiledSequence {
  struct Step {
    GateStep step;
    Operator unitary;  // displace: cavity factor; selective: joint
  };
  std::vector<Step> steps;
  double total_duration_us = 0.0;
};

CompiledSequence compile_sequence(const PulseSequence& seq, const HilbertConfig& cfg);

/// Apply the steps in order. ConditionalWait evolves under H (plus noise in
/// ideal_with_noise mode); a selective rotation acts as an ideal unitary at
/// the midpoint of its window, with the dispersive shift suspended or active
/// during the window per the gate model.
JointState execute_sequence(const JointState& state, const CompiledSequence& seq,
                            const NoiseModel& noise, double chi, const GateModel& model,
                            const HilbertConfig& cfg, const ExecutionOptions& options = {});
JointState execute_sequence(const JointState& state, const PulseSequence& seq,
                            const NoiseModel& noise, double chi, const GateModel& model,
                            const HilbertConfig& cfg, const ExecutionOptions& options = {});

/// Same step semantics on a single Monte-Carlo trajectory (pure state,
/// stochastic jumps during timed windows). Reset steps are not supported
/// here; measurement-based sequences never contain them.
StateVector execute_sequence_trajectory(StateVector psi, const CompiledSequence& seq,
                                        const NoiseModel& noise, double chi,
                                        const GateModel& model, const HilbertConfig& cfg,
                                        Rng& rng, JumpRecord* record = nullptr,
                                        double time_origin_us = 0.0);
StateVector execute_sequence_trajectory(StateVector psi, const PulseSequence& seq,
                                        const NoiseModel& noise, double chi,
                                        const GateModel& model, const HilbertConfig& cfg,
                                        Rng& rng, JumpRecord* record = nullptr,
                                        double time_origin_us = 0.0);

}  // namespace catqec
