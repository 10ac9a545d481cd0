// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "mapper/density_kernels.hpp"
#include "mapper/experiment.hpp"
#include "mapper/synth.hpp"

using namespace mapper;

namespace {

PointCloud annulus_cloud(std::size_t n) {
  return sample(annulus_polygon(24, 1, 0.1), n, 0.05, 17);
}

double bandwidth(std::size_t n) { return default_bandwidth(n, 2, 3.0); }

void BM_BumpSumsSerial(benchmark::State& state) {
  const auto pc = annulus_cloud(state.range(0));
  const double r = bandwidth(pc.size());
  for (auto _ : state) benchmark::DoNotOptimize(kernels::bump_sums_serial(pc.coords, pc.dim, r));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BumpSumsParallel(benchmark::State& state) {
  const auto pc = annulus_cloud(state.range(0));
  const double r = bandwidth(pc.size());
  for (auto _ : state) benchmark::DoNotOptimize(kernels::bump_sums_parallel(pc.coords, pc.dim, r));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_PairsSerial(benchmark::State& state) {
  const auto pc = annulus_cloud(state.range(0));
  const double r = 2 * bandwidth(pc.size());
  for (auto _ : state) benchmark::DoNotOptimize(kernels::pairs_within_serial(pc.coords, pc.dim, r));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_PairsParallel(benchmark::State& state) {
  const auto pc = annulus_cloud(state.range(0));
  const double r = 2 * bandwidth(pc.size());
  for (auto _ : state) benchmark::DoNotOptimize(kernels::pairs_within_parallel(pc.coords, pc.dim, r));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

ExperimentPlan small_plan() {
  ExperimentPlan plan;
  plan.complex = annulus_polygon(24, 1, 0.1);
  plan.cover = NiceCover({{-1.5, -0.6}, {-0.8, 0.8}, {0.6, 1.5}});
  plan.sigma = 0.05;
  plan.sizes = {1000};
  plan.trials = 8;
  plan.seed = 7;
  plan.delta_pitch = 0.02;
  return plan;
}

void BM_Experiment(benchmark::State& state) {
  const auto plan = small_plan();
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(plan, static_cast<int>(state.range(0))));
}

}  // namespace

BENCHMARK(BM_BumpSumsSerial)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BumpSumsParallel)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PairsSerial)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PairsParallel)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Experiment)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
