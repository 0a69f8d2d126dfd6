// Serial reference against OpenMP kernel on the three hot loops: simplex
// pivots, the online DP sweep and the configuration distance table.
#include <benchmark/benchmark.h>

#include "sks/experiment.hpp"
#include "sks/oracles.hpp"
#include "sks/planner.hpp"
#include "sks/tableau.hpp"

namespace {

sks::ExecPolicy policy_of(const benchmark::State& state) {
  return state.range(1) ? sks::ExecPolicy::kParallel : sks::ExecPolicy::kSerial;
}

void label(benchmark::State& state) { state.SetLabel(state.range(1) ? "parallel" : "serial"); }

void BM_Pivot(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  sks::Tableau base(n, 2 * n);
  sks::Rng rng = sks::make_stream(1, 0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < 2 * n; ++c) base(r, c) = 1.0 + sks::uniform01(rng);
  const sks::ExecPolicy policy = policy_of(state);
  std::size_t step = 0;
  sks::Tableau t = base;
  for (auto _ : state) {
    if (++step % 64 == 0) t = base;
    const std::size_t r = step % (n - 1);
    sks::pivot(t, r, (step * 7) % (2 * n - 1), policy);
    benchmark::DoNotOptimize(t.data().data());
  }
  label(state);
}

void BM_LpSolve(benchmark::State& state) {
  const sks::SynthInstance inst = sks::synth_instance(static_cast<std::size_t>(state.range(0)), 5,
                                                      sks::MetricKind::kLine, 3, 1.0);
  sks::SolveOptions opts;
  opts.policy = policy_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(sks::plan_nonadaptive(inst.metric, inst.dists, 3, opts));
  label(state);
}

void BM_OnlineDp(benchmark::State& state) {
  const sks::SynthInstance inst = sks::synth_instance(10, 5, sks::MetricKind::kLine, 4, 1.0);
  sks::OracleOptions opts;
  opts.policy = policy_of(state);
  for (auto _ : state)
    benchmark::DoNotOptimize(sks::optimal_online_dp(inst.metric, inst.dists, static_cast<int>(state.range(0)),
                                                    sks::CostMode::kCover, opts));
  label(state);
}

void BM_DistanceTable(benchmark::State& state) {
  const sks::SynthInstance inst = sks::synth_instance(10, 1, sks::MetricKind::kGeneral, 5, 1.0);
  const sks::ConfigSpace space(10, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sks::config_distance_table(inst.metric, space, policy_of(state)));
  label(state);
}

}  // namespace

BENCHMARK(BM_Pivot)->ArgsProduct({{64, 256, 1024}, {0, 1}});
BENCHMARK(BM_LpSolve)->ArgsProduct({{6, 10}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OnlineDp)->ArgsProduct({{2, 3, 4}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DistanceTable)->ArgsProduct({{2, 3}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
