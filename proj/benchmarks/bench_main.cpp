#include <benchmark/benchmark.h>

#include "entforge/circuit.hpp"
#include "entforge/entanglement.hpp"
#include "entforge/noise.hpp"
#include "entforge/sawtooth.hpp"
#include "entforge/trajectories.hpp"

using namespace entforge;

namespace {

void BM_MapStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const MapParams p = MapParams::make(n);
  const GateSequence circuit = build_step_circuit(p);
  StateVector psi = haar_random_state(n, 1);
  for (auto _ : state) {
    for (const Gate& g : circuit.gates) apply_gate(psi, g);
    benchmark::DoNotOptimize(psi);
  }
  state.counters["gates"] = static_cast<double>(circuit.gates.size());
}
BENCHMARK(BM_MapStep)->DenseRange(4, 16, 4);

void BM_NoisyMapStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const MapParams p = MapParams::make(n);
  const GateSequence circuit = build_step_circuit(p);
  const NoiseStream stream(7, 0);
  StateVector psi = haar_random_state(n, 1);
  std::uint64_t ordinal = 0;
  for (auto _ : state) {
    for (const Gate& g : circuit.gates) apply_noisy_gate(psi, g, stream, ordinal++, 1e-3);
    benchmark::DoNotOptimize(psi);
  }
}
BENCHMARK(BM_NoisyMapStep)->DenseRange(4, 16, 4);

void BM_ExactStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const MapParams p = MapParams::make(n);
  const StateVector psi = haar_random_state(n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(evolve_exact(psi, p, 1));
}
BENCHMARK(BM_ExactStep)->DenseRange(4, 16, 4);

void BM_Trajectories(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const MapParams p = MapParams::make(n);
  const StateVector psi = StateVector::basis(n, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_trajectories(p, 30, 1e-2, 64, 1, psi));
  }
}
BENCHMARK(BM_Trajectories)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_PureSpectrum(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const StateVector psi = haar_random_state(n, 3);
  for (auto _ : state) benchmark::DoNotOptimize(pure_spectrum(psi));
}
BENCHMARK(BM_PureSpectrum)->DenseRange(4, 12, 2)->Unit(benchmark::kMillisecond);

void BM_MixedSpectrum(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const MapParams p = MapParams::make(n);
  const auto r = run_trajectories(p, 30, 1e-2, 32, 1, StateVector::basis(n, 0));
  for (auto _ : state) benchmark::DoNotOptimize(mixed_spectrum(*r.rho));
}
BENCHMARK(BM_MixedSpectrum)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
