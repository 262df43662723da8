#include <benchmark/benchmark.h>

#include "ranklab/model.hpp"
#include "ranklab/presets.hpp"
#include "ranklab/simulator.hpp"
#include "ranklab/stats.hpp"

using namespace ranklab;

static void BM_ClickDistribution(benchmark::State& state) {
  const auto items = item_stances_for(static_cast<std::size_t>(state.range(0)));
  const BehaviorParams params = presets::pooled();
  Rng rng(1);
  const RankedList ranking = RankedList::random(items.size(), rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(click_distribution(items, ranking, Stance(1), params));
  }
}
BENCHMARK(BM_ClickDistribution)->Arg(2)->Arg(20)->Arg(200);

static void BM_RankForGroup(benchmark::State& state) {
  const auto items = item_stances_for(2);
  PopularityState pop(items.size());
  Rng rng(2);
  const RankedList previous = RankedList::identity(items.size());
  for (auto _ : state) {
    apply_interaction_in_place(pop, Stance(-1), rng.below(items.size()), true, AlgorithmParams{3.0, 0.5});
    benchmark::DoNotOptimize(rank_for_group(pop, UserGroup::Left, previous));
  }
}
BENCHMARK(BM_RankForGroup);

static void BM_SimulatedRun(benchmark::State& state) {
  RunConfig config;
  config.behavior = presets::pooled();
  config.algo = {100.0, 1.0};
  config.n_interactions = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    config.seed++;
    benchmark::DoNotOptimize(run(config));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulatedRun)->Arg(500)->Arg(5000);

static void BM_MannWhitney(benchmark::State& state) {
  Rng rng(3);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> a(n), b(n);
  for (auto& x : a) x = static_cast<double>(rng.below(5));
  for (auto& x : b) x = static_cast<double>(rng.below(5));
  for (auto _ : state) {
    benchmark::DoNotOptimize(stats::mann_whitney_u(a, b));
  }
}
BENCHMARK(BM_MannWhitney)->Arg(6)->Arg(200)->Arg(10000);
