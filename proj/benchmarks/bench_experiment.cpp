#include <benchmark/benchmark.h>

#include "colosim/experiment.hpp"

namespace {

using namespace colosim;

void BM_Run(benchmark::State& state) {
  ExperimentConfig config;
  config.slots = static_cast<int>(state.range(0));
  config.victim_count = 4 * config.slots;
  config.attack.instance_count = 5;
  for (auto _ : state) {
    const auto result = run(config);
    benchmark::DoNotOptimize(result.colocation_rate);
  }
  state.SetItemsProcessed(state.iterations() * config.slots);
}
BENCHMARK(BM_Run)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_RunWithMigration(benchmark::State& state) {
  ExperimentConfig config;
  config.slots = 200;
  config.victim_count = 800;
  config.attack.lifetime_slots = 0;
  config.migration = MigrationConfig{};
  config.migration->probability = 0.05;
  for (auto _ : state) benchmark::DoNotOptimize(run(config).colocation_rate);
}
BENCHMARK(BM_RunWithMigration)->Unit(benchmark::kMillisecond);

}  // namespace
