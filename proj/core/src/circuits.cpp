#include "catqec/circuits.hpp"

#include <atomic>
#include <thread>

namespace catqec {

ProtocolParams ProtocolParams::from_config(const ExperimentConfig& config) {
  ProtocolParams p;
  p.code = config.code();
  p.chi = config.chi();
  p.kappa = config.noise().kappa;
  p.tw_us = config.tw_us;
  p.t_sel_us = config.t_sel_us();
  return p;
}

namespace {

using K = GateStep;

PulseSequence entropy_transfer_steps(const ProtocolParams& p) {
  const double w2 = p.half_pi_wait_us();
  const double ts = p.t_sel_us;
  const double nb_p = p.nbar_prime();
  PulseSequence s;
  s.steps = {
      K::displace(kImag * p.alpha_prime()),
      K::selective_rotation(kPi, -2.0 * nb_p, ts),
      K::displace(-p.beta_prime()),
      K::conditional_wait(w2),
      K::selective_rotation(kPi, -2.0 * nb_p, ts),
      K::displace(kImag * p.beta_prime()),
      K::conditional_wait(w2),
      K::selective_rotation(kPi / 2.0, kPi / 2.0, ts),
  };
  return s;
}

PulseSequence repump_steps(const ProtocolParams& p) {
  const double ts = p.t_sel_us;
  // Displacing by +beta_prime_d twice moves the g component from a'(1-i) to
  // a(1-i) while the vacuum component makes a round trip through the Pi flip;
  // the opposite sign would drain instead of re-pump.
  PulseSequence s;
  s.steps = {
      K::selective_rotation(kPi, p.code.nbar() - p.nbar_prime() - kPi / 4.0, ts),
      K::displace(p.beta_prime_d()),
      K::conditional_wait(p.pi_wait_us()),
      K::displace(p.beta_prime_d()),
      K::selective_rotation(-kPi, 0.0, ts),
  };
  return s;
}

PulseSequence reencode_steps(const ProtocolParams& p) {
  const double w2 = p.half_pi_wait_us();
  const double ts = p.t_sel_us;
  const double nb = p.code.nbar();
  const Complex beta = p.code.beta();
  PulseSequence s;
  s.steps = {
      K::selective_rotation(kPi / 2.0, 0.0, ts),
      K::displace(beta),
      K::conditional_wait(w2),
      K::selective_rotation(kPi / 2.0, 0.0, ts),
      K::displace(-kImag * beta),
      K::conditional_wait(w2),
      K::selective_rotation(-kPi, 2.0 * nb, ts),
      K::displace(-beta),
      K::selective_rotation(-kPi, 2.0 * nb, ts),
      K::displace(-p.code.alpha),
  };
  return s;
}

}  // namespace

PulseSequence build_encode(const ProtocolParams& p) {
  const double w2 = p.half_pi_wait_us();
  const double ts = p.t_sel_us;
  const double nb = p.code.nbar();
  const Complex a = p.code.alpha;
  const Complex beta = p.code.beta();
  PulseSequence s;
  s.steps = {
      K::displace(a),
      K::conditional_wait(w2),
      K::displace(-kImag * a),
      K::selective_rotation(-kPi / 2.0, 0.0, ts),
      K::displace(beta),
      K::conditional_wait(w2),
      K::selective_rotation(kPi / 2.0, 0.0, ts),
      K::displace(-kImag * beta),
      K::conditional_wait(w2),
      K::selective_rotation(-kPi, 2.0 * nb, ts),
      K::displace(-beta),
      K::selective_rotation(-kPi, 2.0 * nb, ts),
      K::displace(-a),
  };
  return s;
}

PulseSequence build_decode(const ProtocolParams& p) {
  const double w2 = p.half_pi_wait_us();
  const double ts = p.t_sel_us;
  const double nb = p.code.nbar();
  const Complex a = p.code.alpha;
  const Complex beta = p.code.beta();
  PulseSequence s;
  s.steps = {
      K::displace(a),
      K::selective_rotation(kPi, 0.0, ts),
      K::displace(kImag * beta),
      K::conditional_wait(w2),
      K::selective_rotation(kPi, -2.0 * nb, ts),
      K::displace(beta),
      K::conditional_wait(w2),
      K::selective_rotation(-kPi / 2.0, 2.0 * nb, ts),
      K::displace(-kImag * beta),
      K::selective_rotation(kPi / 2.0, 0.0, ts),
      K::displace(-kImag * a),
      K::conditional_wait(w2),
      K::displace(-a),
  };
  return s;
}

PulseSequence build_correct(const ProtocolParams& p) {
  PulseSequence s = entropy_transfer_steps(p);
  s.steps.push_back(K::reset());
  s += repump_steps(p);
  s += reencode_steps(p);
  return s;
}

PulseSequence build_correct_mbqec(const ProtocolParams& p, int c_mod4) {
  if (c_mod4 < 0 || c_mod4 > 3) throw std::invalid_argument("c_mod4 must be in {0,1,2,3}");
  const double ts = p.t_sel_us;
  const Complex arm = p.alpha_prime() * Complex(1.0, -1.0);  // c_g component after (a)
  PulseSequence s = entropy_transfer_steps(p);
  if (c_mod4 >= 2) {
    // psi^(2/3) differ from psi^(0/1) by the sign of the c_e branch, which
    // sits in the vacuum component here; a selective 2pi rotation is -1 there.
    s.steps.push_back(K::selective_rotation(2.0 * kPi, 0.0, ts));
  }
  // Undo the known (|g> +- |e>)/sqrt(2) deterministically: rotate the vacuum
  // component, swap the far component into the vacuum, rotate it, swap back.
  const double theta = (c_mod4 % 2 == 0) ? -kPi / 2.0 : kPi / 2.0;
  s.steps.push_back(K::selective_rotation(theta, 0.0, ts));
  s.steps.push_back(K::displace(-arm));
  s.steps.push_back(K::selective_rotation(theta, 0.0, ts));
  s.steps.push_back(K::displace(arm));
  s += repump_steps(p);
  s += reencode_steps(p);
  return s;
}

// ---------------------------------------------------------------------------
// Parity measurement
// ---------------------------------------------------------------------------

namespace {

double even_weight_pure(const StateVector& psi, int nf) {
  double w = 0.0;
  for (int q = 0; q < 2; ++q)
    for (int n = 0; n < nf; n += 2) w += std::norm(psi(q * nf + n));
  return w;
}

}  // namespace

std::pair<int, StateVector> parity_measure_pure(const StateVector& psi, Rng& rng,
                                                const HilbertConfig& cfg) {
  const int nf = cfg.fock_dim;
  const double norm_sq = psi.squaredNorm();
  const double p_plus = even_weight_pure(psi, nf) / norm_sq;
  const double u = rng.uniform();
  const int outcome = (u < p_plus) ? +1 : -1;
  const double p_branch = (outcome > 0) ? p_plus : 1.0 - p_plus;
  if (p_branch < 1e-14)
    throw ZeroProbability("sampled parity branch has probability below 1e-14");
  StateVector out = psi;
  for (int q = 0; q < 2; ++q)
    for (int n = 0; n < nf; ++n)
      if ((n % 2 == 0) != (outcome > 0)) out(q * nf + n) = 0.0;
  out.normalize();
  return {outcome, out};
}

std::pair<int, JointState> parity_measure(const JointState& state, Rng& rng) {
  const int dim = state.dim();
  const int nf = dim / 2;
  const HilbertConfig cfg{nf};
  if (state.is_pure()) {
    auto [outcome, psi] = parity_measure_pure(state.vector(), rng, cfg);
    return {outcome, JointState::pure(std::move(psi), state.time_us)};
  }
  const Eigen::MatrixXcd& rho = state.matrix();
  double p_plus = 0.0;
  for (int q = 0; q < 2; ++q)
    for (int n = 0; n < nf; n += 2) p_plus += rho(q * nf + n, q * nf + n).real();
  const double u = rng.uniform();
  const int outcome = (u < p_plus) ? +1 : -1;
  const double p_branch = (outcome > 0) ? p_plus : 1.0 - p_plus;
  if (p_branch < 1e-14)
    throw ZeroProbability("sampled parity branch has probability below 1e-14");
  Eigen::MatrixXcd out = rho;
  for (int qi = 0; qi < 2; ++qi)
    for (int m = 0; m < nf; ++m) {
      const bool keep_row = ((m % 2 == 0) == (outcome > 0));
      for (int qj = 0; qj < 2; ++qj)
        for (int n = 0; n < nf; ++n) {
          const bool keep_col = ((n % 2 == 0) == (outcome > 0));
          if (!keep_row || !keep_col) out(qi * nf + m, qj * nf + n) = 0.0;
        }
    }
  out /= p_branch;
  return {outcome, JointState::density(std::move(out), state.time_us)};
}

std::pair<int, JointState> parity_measure(const JointState& state, uint64_t seed) {
  Rng rng(seed);
  return parity_measure(state, rng);
}

// ---------------------------------------------------------------------------
// AQEC loop
// ---------------------------------------------------------------------------

std::vector<CycleReport> run_aqec(const ExperimentConfig& config, const AqecOptions& options) {
  config.validate();
  const HilbertConfig cfg = config.hilbert();
  const NoiseModel noise = config.noise();
  const ProtocolParams params = ProtocolParams::from_config(config);
  const GateModel model = config.make_gate_model();
  ExecutionOptions exec;
  exec.use_exact_dispersive = options.use_exact_dispersive;
  exec.integrator = options.integrator;

  const StateVector target_cavity = logical_state(JumpIndex(0), params.code,
                                                  options.logical, cfg);
  const StateVector target = tensor_state({1.0, 0.0}, target_cavity);

  JointState state = JointState::pure(target, 0.0);
  if (config.init_mode == InitMode::full_encode) {
    StateVector init = tensor_state(options.logical.vector(), coherent_state(0.0, cfg));
    state = execute_sequence(JointState::pure(std::move(init), 0.0), build_encode(params),
                             noise, params.chi, model, cfg, exec);
  }
  state.promote_to_density();

  const Operator parity_op = tensor(qubit_identity(), parity_operator(cfg));
  const CompiledSequence correct = compile_sequence(build_correct(params), cfg);
  const DispersivePropagator prop(params.chi, noise, cfg);

  std::vector<CycleReport> reports;
  reports.reserve(config.n_cycles);
  for (int cycle = 1; cycle <= config.n_cycles; ++cycle) {
    if (config.tw_us > 0.0) {
      if (options.use_exact_dispersive) {
        prop.advance(state, config.tw_us, true);
      } else {
        state = evolve_master(state, dispersive_hamiltonian(params.chi, cfg), noise,
                              config.tw_us, options.integrator, cfg);
      }
    }
    if (options.corrections_enabled) {
      state = execute_sequence(state, correct, noise, params.chi, model, cfg, exec);
    } else {
      state.validate();
    }
    reports.push_back({cycle, state.time_us, fidelity(state, target), state.purity(),
                       expectation(state, parity_op)});
  }
  if (options.final_decode_fidelity) {
    state = execute_sequence(state, build_decode(params), noise, params.chi, model, cfg, exec);
    const StateVector recovered =
        tensor_state(options.logical.vector(), coherent_state(0.0, cfg));
    *options.final_decode_fidelity = fidelity(state, recovered);
  }
  return reports;
}

// ---------------------------------------------------------------------------
// MBQEC trajectory ensemble
// ---------------------------------------------------------------------------

namespace {

struct TrajectoryOutput {
  std::vector<double> fidelity;  // per cycle
  int first_wait_jumps = 0;
};

struct MbqecShared {
  HilbertConfig cfg;
  NoiseModel noise;
  GateModel model;
  StateVector target;
  std::array<CompiledSequence, 4> corrections;
};

TrajectoryOutput run_one_mbqec_trajectory(const ExperimentConfig& config,
                                          const ProtocolParams& params,
                                          const MbqecShared& shared, uint64_t seed) {
  const HilbertConfig& cfg = shared.cfg;
  const DiagonalTrajectoryStepper stepper(params.chi, shared.noise, cfg);
  Rng rng(seed);

  StateVector psi = shared.target;
  JumpRecord record;
  double t = 0.0;
  int c = 0;

  TrajectoryOutput out;
  out.fidelity.reserve(config.n_cycles);
  for (int cycle = 1; cycle <= config.n_cycles; ++cycle) {
    const size_t events_before = record.events.size();
    stepper.advance(psi, config.tw_us, true, rng, &record, t);
    t += config.tw_us;
    if (cycle == 1) {
      for (size_t k = events_before; k < record.events.size(); ++k)
        if (record.events[k].channel == 0) ++out.first_wait_jumps;
    }
    auto [outcome, projected] = parity_measure_pure(psi, rng, cfg);
    psi = std::move(projected);
    const int expected = (c % 2 == 0) ? +1 : -1;
    if (outcome != expected) ++c;
    if (!(shared.noise.is_zero() && c % 4 == 0)) {
      const CompiledSequence& seq = shared.corrections[c % 4];
      psi = execute_sequence_trajectory(std::move(psi), seq, shared.noise, params.chi,
                                        shared.model, cfg, rng, &record, t);
      t += seq.total_duration_us;
      c = 0;
    }
    out.fidelity.push_back(state_overlap_sq(shared.target, psi));
  }
  return out;
}

}  // namespace

MbqecResult run_mbqec(const ExperimentConfig& config, int n_trajectories,
                      const MbqecOptions& options) {
  config.validate();
  if (n_trajectories < 1) throw std::invalid_argument("n_trajectories must be >= 1");
  const ProtocolParams params = ProtocolParams::from_config(config);

  MbqecShared shared{config.hilbert(), config.noise(), config.make_gate_model(), {}, {}};
  shared.target = tensor_state(
      {1.0, 0.0}, logical_state(JumpIndex(0), params.code, options.logical, shared.cfg));
  for (int c = 0; c < 4; ++c)
    shared.corrections[c] = compile_sequence(build_correct_mbqec(params, c), shared.cfg);

  std::vector<TrajectoryOutput> outputs(n_trajectories);
  int n_threads = options.n_threads > 0
                      ? options.n_threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min(n_threads, n_trajectories));

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n_trajectories) return;
      outputs[i] = run_one_mbqec_trajectory(config, params, shared,
                                            Rng::derive_seed(config.seed, i));
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (int k = 0; k < n_threads; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  MbqecResult result;
  result.n_trajectories = n_trajectories;
  result.first_wait_jumps.reserve(n_trajectories);
  const PulseSequence seq0 = build_correct_mbqec(params, 0);
  const double cycle_time = config.tw_us + seq0.total_duration_us();
  result.epochs.reserve(config.n_cycles);
  for (int cycle = 1; cycle <= config.n_cycles; ++cycle) {
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n_trajectories; ++i) {
      const double f = outputs[i].fidelity[cycle - 1];
      sum += f;
      sum_sq += f * f;
    }
    const double mean = sum / n_trajectories;
    const double var = std::max(0.0, sum_sq / n_trajectories - mean * mean);
    const double stderr_f =
        n_trajectories > 1 ? std::sqrt(var / (n_trajectories - 1)) : 0.0;
    result.epochs.push_back({cycle, cycle * cycle_time, mean, stderr_f});
  }
  long total_jumps = 0;
  for (int i = 0; i < n_trajectories; ++i) {
    result.first_wait_jumps.push_back(outputs[i].first_wait_jumps);
    total_jumps += outputs[i].first_wait_jumps;
  }
  result.mean_first_wait_jumps = static_cast<double>(total_jumps) / n_trajectories;
  return result;
}

}  // namespace catqec
