#include <benchmark/benchmark.h>

#include <vector>

#include "ddps/offload.hpp"
#include "ddps/pricing.hpp"
#include "ddps/scenario.hpp"
#include "ddps/simulator.hpp"

using namespace ddps;

static void BM_Decide(benchmark::State& state) {
  energy::EnergyParams p;
  p.panel_area = 0.01;
  offload::TaskRequest t;
  t.data_bits = 3e6;
  t.deadline = 0.5;
  t.local_cpu = 1e9;
  double bits = 0.0;
  for (auto _ : state) {
    const auto d = offload::decide(t, {0.5, 0}, p, 0.05);
    bits += d.offload_bits;
  }
  benchmark::DoNotOptimize(bits);
}
BENCHMARK(BM_Decide);

static void BM_UniformPrice(benchmark::State& state) {
  std::vector<pricing::UniformCandidate> users;
  for (int i = 0; i < state.range(0); ++i)
    users.push_back({100.0, 2e6, 1e8 * (1 + i % 10), 1e8 + 1e6 * i});
  for (auto _ : state) benchmark::DoNotOptimize(pricing::uniform_payment(users, 6e9));
}
BENCHMARK(BM_UniformPrice)->Arg(20)->Arg(60)->Arg(200);

static void BM_Run(benchmark::State& state) {
  Scenario s = paper_defaults();
  s.strategy = static_cast<pricing::Strategy>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sim::run(s).metrics.avg_latency);
  state.SetLabel(std::string(pricing::name(s.strategy)));
}
BENCHMARK(BM_Run)->DenseRange(0, 4);

static void BM_Fig3Sweep(benchmark::State& state) {
  const Scenario s = paper_defaults();
  const std::vector<double> caps{1e9, 2e9, 3e9, 4e9, 5e9, 6e9};
  const std::vector<pricing::Strategy> all(pricing::kAllStrategies.begin(),
                                           pricing::kAllStrategies.end());
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const auto threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(sim::sweep(s, SweepAxis::kCapacity, caps, all, seeds, threads));
}
BENCHMARK(BM_Fig3Sweep)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
