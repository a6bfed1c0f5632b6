#include <benchmark/benchmark.h>

#include "catqec/dynamics.hpp"
#include "catqec/states.hpp"

using namespace catqec;

namespace {

Eigen::MatrixXcd probe_density(const HilbertConfig& cfg) {
  StateVector psi =
      0.8 * tensor_state({1.0, 0.0}, coherent_state(Complex(1.2, 0.3), cfg)) +
      0.6 * tensor_state({0.0, 1.0}, coherent_state(Complex(-0.4, 1.0), cfg));
  psi.normalize();
  return psi * psi.adjoint();
}

}  // namespace

static void BM_ExactPropagatorWait(benchmark::State& state) {
  const HilbertConfig cfg{static_cast<int>(state.range(0))};
  const NoiseModel noise = NoiseModel::from_times(2000.0, 100.0, 100.0);
  const DispersivePropagator prop(2.0 * kPi * 40.0, noise, cfg);
  const Eigen::MatrixXcd rho = probe_density(cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(prop.apply(rho, 65.6, true));
  }
}
BENCHMARK(BM_ExactPropagatorWait)->Arg(40)->Arg(70)->Arg(100);

static void BM_ExactPropagatorGateWindow(benchmark::State& state) {
  const HilbertConfig cfg{70};
  const NoiseModel noise = NoiseModel::from_times(2000.0, 100.0, 100.0);
  const DispersivePropagator prop(2.0 * kPi * 40.0, noise, cfg);
  const Eigen::MatrixXcd rho = probe_density(cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(prop.apply(rho, 0.00625, true));
  }
}
BENCHMARK(BM_ExactPropagatorGateWindow);

static void BM_MasterEquationGateWindow(benchmark::State& state) {
  const HilbertConfig cfg{static_cast<int>(state.range(0))};
  const NoiseModel noise = NoiseModel::from_times(2000.0, 100.0, 100.0);
  const Operator h = dispersive_hamiltonian(2.0 * kPi * 40.0, cfg);
  JointState rho = JointState::density(probe_density(cfg));
  IntegratorSettings settings;
  for (auto _ : state) {
    benchmark::DoNotOptimize(evolve_master(rho, h, noise, 0.00625, settings, cfg));
  }
}
BENCHMARK(BM_MasterEquationGateWindow)->Arg(16)->Arg(24);
