#include <benchmark/benchmark.h>

#include <cmath>

#include "rectprop/amplitudes.hpp"
#include "rectprop/engines.hpp"
#include "rectprop/greens.hpp"
#include "rectprop/oracle.hpp"

using namespace rectprop;

static void BM_AmplitudeSet(benchmark::State& state) {
  const PotentialSpec pot{10.0, 5.0};
  double E = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(amplitude_set(E, pot));
    E = E > 100.0 ? 0.1 : E * 1.01;
  }
}
BENCHMARK(BM_AmplitudeSet);

static void BM_RegionalGreen(benchmark::State& state) {
  const PotentialSpec pot{-30.0, 5.0};
  for (auto _ : state) benchmark::DoNotOptimize(regional_green(0.5, -2.0, 7.3, pot));
}
BENCHMARK(BM_RegionalGreen);

static void BM_DensityMatrix(benchmark::State& state) {
  const double x = static_cast<double>(state.range(0)) / 4.0;
  const PotentialSpec pot{10.0, 5.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(density_matrix(EvaluationPoint::thermal(x, -1.0, 10.0), pot));
  }
}
BENCHMARK(BM_DensityMatrix)->Arg(-8)->Arg(2)->Arg(8)->Unit(benchmark::kMicrosecond);

static void BM_Propagator(benchmark::State& state) {
  const double t = static_cast<double>(state.range(0));
  const PotentialSpec pot{10.0, 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(propagator(EvaluationPoint::real_time(2.0, -3.0, t), pot));
  }
}
BENCHMARK(BM_Propagator)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_Fig1Sweep(benchmark::State& state) {
  SweepSpec spec = figure_preset(1);
  spec.samples = 60;
  for (auto _ : state) benchmark::DoNotOptimize(sweep(spec, {}, static_cast<unsigned>(state.range(0))));
}
BENCHMARK(BM_Fig1Sweep)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

static void BM_ThermalOracle(benchmark::State& state) {
  const GridSpec grid{40.0, static_cast<int>(state.range(0))};
  for (auto _ : state) {
    benchmark::DoNotOptimize(thermal_kernel_oracle(grid, {10.0, 0.0}, 10.0, 0.5, -1.0));
  }
}
BENCHMARK(BM_ThermalOracle)->Arg(3999)->Arg(7999)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
