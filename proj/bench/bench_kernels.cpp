#include <benchmark/benchmark.h>

#include "molmimo/analytic.hpp"
#include "molmimo/harness.hpp"
#include "molmimo/particle.hpp"

using namespace molmimo;

namespace {

const Geometry kGeometry{};

void BM_SimulateHitsSerial(benchmark::State& state) {
  const Scene scene = mimo_scene(kGeometry, 1e-4);
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_hits_serial(scene, 0, n, kGeometry.Ts, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SimulateHitsParallel(benchmark::State& state) {
  const Scene scene = mimo_scene(kGeometry, 1e-4);
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_hits(scene, 0, n, kGeometry.Ts, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

ExperimentConfig bench_config(std::int64_t R) {
  ExperimentConfig cfg;
  cfg.scheme = Scheme::repetition;
  cfg.detector = Detector::mlse;
  cfg.K = 10000;
  cfg.R = R;
  return cfg;
}

void BM_RunExperimentSerial(benchmark::State& state) {
  const auto cfg = bench_config(state.range(0));
  const auto taps = symmetric_mimo_taps(cfg.geometry, FitParams::identity());
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment_serial(cfg, taps));
  state.SetItemsProcessed(state.iterations() * cfg.K * cfg.R);
}

void BM_RunExperimentParallel(benchmark::State& state) {
  const auto cfg = bench_config(state.range(0));
  const auto taps = symmetric_mimo_taps(cfg.geometry, FitParams::identity());
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(cfg, taps));
  state.SetItemsProcessed(state.iterations() * cfg.K * cfg.R);
}

}  // namespace

BENCHMARK(BM_SimulateHitsSerial)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateHitsParallel)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RunExperimentSerial)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RunExperimentParallel)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
