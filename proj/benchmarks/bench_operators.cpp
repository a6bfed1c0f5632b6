#include <benchmark/benchmark.h>

#include "catqec/hilbert.hpp"
#include "catqec/states.hpp"

using namespace catqec;

static void BM_DisplacementOperator(benchmark::State& state) {
  const HilbertConfig cfg{static_cast<int>(state.range(0))};
  for (auto _ : state) {
    benchmark::DoNotOptimize(displacement_operator(Complex(2.0, -2.0), cfg));
  }
}
BENCHMARK(BM_DisplacementOperator)->Arg(40)->Arg(70)->Arg(100);

static void BM_LogicalState(benchmark::State& state) {
  const HilbertConfig cfg{70};
  const CodeParams code(2.0);
  const LogicalQubit q(0.6, 0.8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(logical_state(JumpIndex(1), code, q, cfg));
  }
}
BENCHMARK(BM_LogicalState);

static void BM_PartialTrace(benchmark::State& state) {
  const HilbertConfig cfg{70};
  JointState s = JointState::pure(
      tensor_state({0.6, 0.8}, coherent_state(Complex(1.0, 1.0), cfg)));
  s.promote_to_density();
  for (auto _ : state) {
    benchmark::DoNotOptimize(partial_trace(s, Keep::cavity));
  }
}
BENCHMARK(BM_PartialTrace);
