#include <random>

#include <benchmark/benchmark.h>

#include "thermolab/dynamics.hpp"
#include "thermolab/observability.hpp"
#include "thermolab/resolvent.hpp"
#include "thermolab/spectral.hpp"

using namespace thermolab;

namespace {

OperatorSet restricted(int n) {
  return restrict_zero_mean_temperature(assemble_example1(build_grid(n), 1.0));
}

void BM_MidpointStep(benchmark::State& state) {
  const OperatorSet ops = restricted(static_cast<int>(state.range(0)));
  const BlockGenerator gen = assemble_generator(ops, GeneratorKind::damped_cattaneo);
  const MidpointStepper stepper(gen.G, 1e-3);
  std::mt19937_64 rng(1);
  StateVector z = SmoothStateSampler(ops, 8).cattaneo(rng);
  for (auto _ : state) {
    stepper.advance(z);
    benchmark::DoNotOptimize(z.data());
  }
}
BENCHMARK(BM_MidpointStep)->Arg(50)->Arg(100)->Arg(200);

void BM_DenseSpectrum(benchmark::State& state) {
  const BlockGenerator gen =
      assemble_generator(restricted(static_cast<int>(state.range(0))), GeneratorKind::conservative_cattaneo);
  for (auto _ : state) benchmark::DoNotOptimize(eigen(gen).eigenvalues.data());
}
BENCHMARK(BM_DenseSpectrum)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_ResolventPoint(benchmark::State& state) {
  const BlockGenerator gen =
      assemble_generator(restricted(static_cast<int>(state.range(0))), GeneratorKind::damped_cattaneo);
  const ResolventEvaluator evaluator(gen);
  double beta = 10.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluator.norm(beta));
    beta = beta < 900.0 ? beta * 1.1 : 10.0;
  }
}
BENCHMARK(BM_ResolventPoint)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_Gramian(benchmark::State& state) {
  const BlockGenerator gen = assemble_generator(assemble_example1(build_grid(static_cast<int>(state.range(0))), 1.0),
                                                GeneratorKind::conservative_cattaneo);
  for (auto _ : state) benchmark::DoNotOptimize(gramian(gen, 1.0, 1e-3).G.data());
}
BENCHMARK(BM_Gramian)->Arg(25)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_InghamCheck(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(ingham_direct_check(1.0, 3.0, static_cast<int>(state.range(0)), 20, 7).min_ratio);
  }
}
BENCHMARK(BM_InghamCheck)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
