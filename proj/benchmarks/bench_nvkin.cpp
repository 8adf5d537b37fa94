#include <sstream>

#include <benchmark/benchmark.h>

#include "commands.hpp"
#include "nvkin/kinetics.hpp"
#include "nvkin/resonance.hpp"

using namespace nvkin;

static void BM_Eigensolve3(benchmark::State& state) {
  const auto h = build_hamiltonian({}, FieldVector::from_degrees(0.3, 40.0), Manifold::ground);
  for (auto _ : state) benchmark::DoNotOptimize(eigensolve(h));
}
BENCHMARK(BM_Eigensolve3);

static void BM_Eigensolve9(benchmark::State& state) {
  const auto h = build_hamiltonian({}, FieldVector::from_degrees(0.3, 40.0), Manifold::ground, true);
  for (auto _ : state) benchmark::DoNotOptimize(eigensolve(h));
}
BENCHMARK(BM_Eigensolve9);

static void BM_SolvePoint(benchmark::State& state) {
  const ZeroFieldRates r;
  const double beta = pumping_beta(8.3e4, r);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_point({}, r, FieldVector::from_degrees(0.3, 40.0), beta));
  }
}
BENCHMARK(BM_SolvePoint);

static void BM_ResonantFields(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        resonant_fields({}, 9.43e9, 0.7, TransitionSpec::sqt12(), FieldWindow{}));
  }
}
BENCHMARK(BM_ResonantFields);

static void BM_TimeEvolution50T1(benchmark::State& state) {
  const SpinSystemParams p;
  const ZeroFieldRates r;
  const FieldVector f = FieldVector::from_degrees(0.3, 40.0);
  const auto pt = solve_point(p, r, f, pumping_beta(8.3e4, r));
  const double dt = 0.05 / pt.rates.max_rate();
  for (auto _ : state) {
    benchmark::DoNotOptimize(time_evolution(pt.rates, pt.dark, 50 * r.t1_s, dt, pt.dark));
  }
}
BENCHMARK(BM_TimeEvolution50T1)->Unit(benchmark::kMillisecond);

static void BM_ThetaSweep(benchmark::State& state) {
  cli::RunConfig cfg;
  cfg.jobs = static_cast<int>(state.range(0));
  for (auto _ : state) {
    std::ostringstream out, log;
    cli::cmd_sweep(cfg, cli::SweepMode::theta, out, log);
    benchmark::DoNotOptimize(out.str());
  }
}
BENCHMARK(BM_ThetaSweep)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
