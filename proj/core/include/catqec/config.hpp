#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "catqec/dynamics.hpp"
#include "catqec/gates.hpp"
#include "catqec/states.hpp"

namespace catqec {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class InitMode { ideal_state, full_encode };

/// Physical, protocol and numerical parameters of one run. Units are baked
/// into the key names; `inf` is accepted for the decoherence times.
struct ExperimentConfig {
  double chi_over_2pi_mhz = 40.0;
  double t1_us = 100.0;
  double t2_us = 100.0;
  double tcav_us = 2000.0;
  double nbar = 4.0;
  double alpha_phase = 0.0;
  int fock_dim = 70;
  double tw_us = 65.6;
  int n_cycles = 60;
  GateModel::SelectivePhase gate_model = GateModel::SelectivePhase::suspended;
  double t_sel_ns = 54.0;
  uint64_t seed = 1;
  InitMode init_mode = InitMode::ideal_state;

  double chi() const { return 2.0 * kPi * chi_over_2pi_mhz; }  // rad/us
  double t_sel_us() const { return t_sel_ns * 1e-3; }

  HilbertConfig hilbert() const { return HilbertConfig{fock_dim}; }
  NoiseModel noise() const { return NoiseModel::from_times(tcav_us, t1_us, t2_us); }
  CodeParams code() const { return CodeParams::from_nbar(nbar, alpha_phase); }
  GateModel make_gate_model() const {
    GateModel m;
    m.mode = GateModel::Mode::ideal_with_noise;
    m.hamiltonian_during_selective = gate_model;
    return m;
  }

  void validate() const;

  /// Parse a flat key=value file. Unknown keys, malformed lines and bad
  /// values are hard errors with line numbers.
  static ExperimentConfig from_file(const std::string& path);
  static ExperimentConfig from_string(const std::string& text,
                                      const std::string& origin = "<string>");

  /// All keys with their resolved values, for echoing into summaries.
  std::map<std::string, std::string> resolved_keys() const;
};

}  // namespace catqec
