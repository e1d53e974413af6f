#include <benchmark/benchmark.h>

#include "colosim/cluster.hpp"
#include "colosim/scheduler.hpp"
#include "colosim/workload.hpp"

namespace {

using namespace colosim;

void BM_Schedule(benchmark::State& state) {
  ClusterGenConfig cluster_config;
  cluster_config.node_count = static_cast<std::size_t>(state.range(0));
  ClusterState cluster = generate_cluster(cluster_config, 1);
  WorkloadConfig workload;
  workload.p_mn = workload.p_ma = 0.9;
  SchedulerConfig scheduler;
  scheduler.skip_probability = static_cast<double>(state.range(1)) / 100.0;
  Rng rng(2);
  std::uint64_t id = 1;
  for (auto _ : state) {
    const AppSpec spec = generate_app_spec(workload, cluster.universe(), rng, InstanceId{id++});
    const auto decision = schedule(spec, cluster, scheduler, rng);
    if (decision.placed()) cluster.release(spec.id);
    benchmark::DoNotOptimize(decision);
  }
}
BENCHMARK(BM_Schedule)->Args({100, 0})->Args({100, 5})->Args({1000, 0})->Args({1000, 5});

void BM_Filter(benchmark::State& state) {
  ClusterGenConfig cluster_config;
  cluster_config.node_count = static_cast<std::size_t>(state.range(0));
  const ClusterState cluster = generate_cluster(cluster_config, 1);
  WorkloadConfig workload;
  Rng rng(3);
  const AppSpec spec = generate_app_spec(workload, cluster.universe(), rng, InstanceId{1});
  for (auto _ : state) benchmark::DoNotOptimize(filter(spec, cluster));
}
BENCHMARK(BM_Filter)->Arg(100)->Arg(1000);

}  // namespace
