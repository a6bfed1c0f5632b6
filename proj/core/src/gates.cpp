#include "catqec/gates.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace catqec {

double PulseSequence::total_duration_us() const {
  double t = 0.0;
  for (const auto& s : steps) t += s.duration_us;
  return t;
}

PulseSequence& PulseSequence::operator+=(const PulseSequence& other) {
  steps.insert(steps.end(), other.steps.begin(), other.steps.end());
  return *this;
}

namespace {

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

std::string PulseSequence::to_text() const {
  std::string out;
  for (const auto& s : steps) {
    switch (s.kind) {
      case GateStep::Kind::displace:
        out += "D " + fmt_g(s.amplitude.real()) + "," + fmt_g(s.amplitude.imag());
        break;
      case GateStep::Kind::conditional_wait:
        out += "WAIT " + fmt_g(s.duration_us);
        break;
      case GateStep::Kind::selective_rotation:
        out += "X0 " + fmt_g(s.theta) + "," + fmt_g(s.eta) + "," + fmt_g(s.duration_us);
        break;
      case GateStep::Kind::reset:
        out += "RESET";
        break;
    }
    out += "\n";
  }
  return out;
}

PulseSequence PulseSequence::from_text(const std::string& text) {
  PulseSequence seq;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    auto fail = [&](const char* why) {
      throw std::invalid_argument("pulse sequence line " + std::to_string(lineno) + ": " + why);
    };
    if (tag == "D") {
      std::string rest;
      ls >> rest;
      double re = 0, im = 0;
      if (std::sscanf(rest.c_str(), "%lf,%lf", &re, &im) != 2) fail("expected D re,im");
      seq.steps.push_back(GateStep::displace({re, im}));
    } else if (tag == "WAIT") {
      double t = 0;
      if (!(ls >> t)) fail("expected WAIT t_us");
      seq.steps.push_back(GateStep::conditional_wait(t));
    } else if (tag == "X0") {
      std::string rest;
      ls >> rest;
      double theta = 0, eta = 0, dur = 0;
      if (std::sscanf(rest.c_str(), "%lf,%lf,%lf", &theta, &eta, &dur) != 3)
        fail("expected X0 theta,eta,dur_us");
      seq.steps.push_back(GateStep::selective_rotation(theta, eta, dur));
    } else if (tag == "RESET") {
      seq.steps.push_back(GateStep::reset());
    } else {
      fail("unknown step tag");
    }
  }
  return seq;
}

Operator conditional_phase_unitary(double t_us, double chi, const HilbertConfig& cfg) {
  if (t_us < 0.0) throw std::invalid_argument("duration must be non-negative");
  cfg.validate();
  const int nf = cfg.fock_dim;
  Operator u = Operator::Identity(2 * nf, 2 * nf);
  for (int n = 0; n < nf; ++n)
    u(nf + n, nf + n) = std::exp(Complex(0.0, chi * t_us * static_cast<double>(n)));
  return u;
}

Operator selective_rotation_unitary(double theta, double eta, const HilbertConfig& cfg) {
  cfg.validate();
  const int nf = cfg.fock_dim;
  const Complex eip = std::exp(Complex(0.0, eta));
  // R = cos(theta/2) I + sin(theta/2) (e^{i eta}|e><g| - e^{-i eta}|g><e|)
  Eigen::Matrix2cd r;
  r(0, 0) = std::cos(theta / 2.0);
  r(1, 1) = std::cos(theta / 2.0);
  r(1, 0) = std::sin(theta / 2.0) * eip;
  r(0, 1) = -std::sin(theta / 2.0) * std::conj(eip);
  Operator u = Operator::Identity(2 * nf, 2 * nf);
  u(0, 0) = r(0, 0);
  u(0, nf) = r(0, 1);
  u(nf, 0) = r(1, 0);
  u(nf, nf) = r(1, 1);
  return u;
}

JointState reset_channel(const JointState& state, double error_prob) {
  if (error_prob < 0.0 || error_prob > 1.0)
    throw std::invalid_argument("reset error probability must lie in [0,1]");
  const Eigen::MatrixXcd rho = state.to_density_matrix();
  const int nf = static_cast<int>(rho.rows()) / 2;
  const Eigen::MatrixXcd cav = rho.block(0, 0, nf, nf) + rho.block(nf, nf, nf, nf);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(2 * nf, 2 * nf);
  out.block(0, 0, nf, nf) = (1.0 - error_prob) * cav;
  out.block(nf, nf, nf, nf) = error_prob * cav;
  return JointState::density(std::move(out), state.time_us);
}

CompiledSequence compile_sequence(const PulseSequence& seq, const HilbertConfig& cfg) {
  CompiledSequence compiled;
  compiled.steps.reserve(seq.steps.size());
  compiled.total_duration_us = seq.total_duration_us();
  for (const auto& step : seq.steps) {
    CompiledSequence::Step c;
    c.step = step;
    if (step.kind == GateStep::Kind::displace) {
      c.unitary = displacement_operator(step.amplitude, cfg);
    } else if (step.kind == GateStep::Kind::selective_rotation) {
      c.unitary = selective_rotation_unitary(step.theta, step.eta, cfg);
    }
    compiled.steps.push_back(std::move(c));
  }
  return compiled;
}

namespace {

void apply_unitary(JointState& state, const Operator& u) {
  if (state.is_pure()) {
    StateVector psi = u * state.vector();
    state = JointState::pure(std::move(psi), state.time_us);
  } else {
    Eigen::MatrixXcd rho = u * state.matrix() * u.adjoint();
    state = JointState::density(std::move(rho), state.time_us);
  }
}

void apply_displacement(JointState& state, const Operator& d, const HilbertConfig& cfg) {
  const int nf = cfg.fock_dim;
  if (state.is_pure()) {
    StateVector psi = state.vector();
    psi.segment(0, nf) = (d * psi.segment(0, nf)).eval();
    psi.segment(nf, nf) = (d * psi.segment(nf, nf)).eval();
    state = JointState::pure(std::move(psi), state.time_us);
  } else {
    Eigen::MatrixXcd rho = state.matrix();
    for (int qi = 0; qi < 2; ++qi)
      for (int qj = 0; qj < 2; ++qj)
        rho.block(qi * nf, qj * nf, nf, nf) =
            (d * rho.block(qi * nf, qj * nf, nf, nf) * d.adjoint()).eval();
    state = JointState::density(std::move(rho), state.time_us);
  }
}

// Timed evolution window in ideal_with_noise mode.
void evolve_window(JointState& state, double duration_us, bool hamiltonian_on,
                   const NoiseModel& noise, double chi, const HilbertConfig& cfg,
                   const ExecutionOptions& options) {
  if (duration_us <= 0.0) return;
  state.promote_to_density();
  if (options.use_exact_dispersive) {
    DispersivePropagator prop(chi, noise, cfg);
    prop.advance(state, duration_us, hamiltonian_on);
    return;
  }
  if (hamiltonian_on) {
    state = evolve_master(state, dispersive_hamiltonian(chi, cfg), noise, duration_us,
                          options.integrator, cfg);
  } else {
    const Operator h0 = Operator::Zero(cfg.joint_dim(), cfg.joint_dim());
    state = evolve_master(state, h0, noise, duration_us, options.integrator, cfg);
  }
}

}  // namespace

JointState execute_sequence(const JointState& state, const CompiledSequence& seq,
                            const NoiseModel& noise, double chi, const GateModel& model,
                            const HilbertConfig& cfg, const ExecutionOptions& options) {
  JointState s = state;
  const bool noiseless = model.mode == GateModel::Mode::noiseless_ideal;
  const bool h_during_sel =
      model.hamiltonian_during_selective == GateModel::SelectivePhase::active;

  for (const auto& c : seq.steps) {
    const GateStep& step = c.step;
    switch (step.kind) {
      case GateStep::Kind::displace:
        apply_displacement(s, c.unitary, cfg);
        break;
      case GateStep::Kind::conditional_wait:
        if (noiseless) {
          apply_unitary(s, conditional_phase_unitary(step.duration_us, chi, cfg));
          s.time_us += step.duration_us;
        } else {
          evolve_window(s, step.duration_us, true, noise, chi, cfg, options);
        }
        break;
      case GateStep::Kind::selective_rotation: {
        if (noiseless) {
          if (h_during_sel && step.duration_us > 0.0) {
            const Operator half =
                conditional_phase_unitary(step.duration_us / 2.0, chi, cfg);
            apply_unitary(s, half);
            apply_unitary(s, c.unitary);
            apply_unitary(s, half);
          } else {
            apply_unitary(s, c.unitary);
          }
          s.time_us += step.duration_us;
        } else {
          evolve_window(s, step.duration_us / 2.0, h_during_sel, noise, chi, cfg, options);
          apply_unitary(s, c.unitary);
          evolve_window(s, step.duration_us / 2.0, h_during_sel, noise, chi, cfg, options);
        }
        break;
      }
      case GateStep::Kind::reset:
        s = reset_channel(s, noiseless ? 0.0 : model.reset_error);
        break;
    }
  }
  s.validate();
  return s;
}

JointState execute_sequence(const JointState& state, const PulseSequence& seq,
                            const NoiseModel& noise, double chi, const GateModel& model,
                            const HilbertConfig& cfg, const ExecutionOptions& options) {
  return execute_sequence(state, compile_sequence(seq, cfg), noise, chi, model, cfg, options);
}

StateVector execute_sequence_trajectory(StateVector psi, const CompiledSequence& seq,
                                        const NoiseModel& noise, double chi,
                                        const GateModel& model, const HilbertConfig& cfg,
                                        Rng& rng, JumpRecord* record,
                                        double time_origin_us) {
  const bool noiseless = model.mode == GateModel::Mode::noiseless_ideal;
  const bool h_during_sel =
      model.hamiltonian_during_selective == GateModel::SelectivePhase::active;
  const DiagonalTrajectoryStepper stepper(chi, noise, cfg);
  const int nf = cfg.fock_dim;
  double t = time_origin_us;

  auto timed_window = [&](double dur, bool h_on) {
    if (dur <= 0.0) return;
    if (noiseless) {
      if (h_on) psi = conditional_phase_unitary(dur, chi, cfg) * psi;
    } else {
      stepper.advance(psi, dur, h_on, rng, record, t);
    }
    t += dur;
  };

  for (const auto& c : seq.steps) {
    const GateStep& step = c.step;
    switch (step.kind) {
      case GateStep::Kind::displace:
        psi.segment(0, nf) = (c.unitary * psi.segment(0, nf)).eval();
        psi.segment(nf, nf) = (c.unitary * psi.segment(nf, nf)).eval();
        break;
      case GateStep::Kind::conditional_wait:
        timed_window(step.duration_us, true);
        break;
      case GateStep::Kind::selective_rotation:
        timed_window(step.duration_us / 2.0, h_during_sel);
        psi = c.unitary * psi;
        timed_window(step.duration_us / 2.0, h_during_sel);
        break;
      case GateStep::Kind::reset:
        throw std::invalid_argument("reset is not a trajectory (pure-state) operation");
    }
  }
  return psi;
}

StateVector execute_sequence_trajectory(StateVector psi, const PulseSequence& seq,
                                        const NoiseModel& noise, double chi,
                                        const GateModel& model, const HilbertConfig& cfg,
                                        Rng& rng, JumpRecord* record,
                                        double time_origin_us) {
  return execute_sequence_trajectory(std::move(psi), compile_sequence(seq, cfg), noise, chi,
                                     model, cfg, rng, record, time_origin_us);
}

}  // namespace catqec
