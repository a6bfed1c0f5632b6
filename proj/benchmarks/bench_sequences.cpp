#include <benchmark/benchmark.h>

#include "catqec/circuits.hpp"

using namespace catqec;

namespace {

ExperimentConfig bench_config() {
  ExperimentConfig config;
  config.n_cycles = 1;
  return config;
}

}  // namespace

static void BM_CompileCorrect(benchmark::State& state) {
  const ExperimentConfig config = bench_config();
  const ProtocolParams params = ProtocolParams::from_config(config);
  const HilbertConfig cfg = config.hilbert();
  for (auto _ : state) {
    benchmark::DoNotOptimize(compile_sequence(build_correct(params), cfg));
  }
}
BENCHMARK(BM_CompileCorrect);

static void BM_CorrectionCycleDensity(benchmark::State& state) {
  const ExperimentConfig config = bench_config();
  const ProtocolParams params = ProtocolParams::from_config(config);
  const HilbertConfig cfg = config.hilbert();
  const NoiseModel noise = config.noise();
  const GateModel model = config.make_gate_model();
  const CompiledSequence correct = compile_sequence(build_correct(params), cfg);
  AqecOptions defaults;
  JointState rho = JointState::pure(tensor_state(
      {1.0, 0.0}, logical_state(JumpIndex(0), params.code, defaults.logical, cfg)));
  rho.promote_to_density();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        execute_sequence(rho, correct, noise, params.chi, model, cfg));
  }
}
BENCHMARK(BM_CorrectionCycleDensity);

static void BM_MbqecTrajectoryCycle(benchmark::State& state) {
  const ExperimentConfig config = bench_config();
  const ProtocolParams params = ProtocolParams::from_config(config);
  const HilbertConfig cfg = config.hilbert();
  const NoiseModel noise = config.noise();
  const GateModel model = config.make_gate_model();
  const CompiledSequence correct = compile_sequence(build_correct_mbqec(params, 0), cfg);
  const DiagonalTrajectoryStepper stepper(params.chi, noise, cfg);
  AqecOptions defaults;
  const StateVector psi0 = tensor_state(
      {1.0, 0.0}, logical_state(JumpIndex(0), params.code, defaults.logical, cfg));
  Rng rng(9);
  for (auto _ : state) {
    StateVector psi = psi0;
    stepper.advance(psi, config.tw_us, true, rng);
    psi = execute_sequence_trajectory(std::move(psi), correct, noise, params.chi, model,
                                      cfg, rng);
    benchmark::DoNotOptimize(psi);
  }
}
BENCHMARK(BM_MbqecTrajectoryCycle);
