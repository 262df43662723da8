#include <benchmark/benchmark.h>

#include "ranklab/estimation.hpp"
#include "ranklab/presets.hpp"
#include "ranklab/replay.hpp"
#include "ranklab/simulator.hpp"

using namespace ranklab;

namespace {

InteractionLog synthetic(std::size_t users) {
  SyntheticLogOptions o;
  o.n_users = users;
  o.seed = 11;
  return generate_synthetic_log(presets::pooled(), o);
}

}  // namespace

static void BM_GenerateSynthetic(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(synthetic(static_cast<std::size_t>(state.range(0))));
  }
}
BENCHMARK(BM_GenerateSynthetic)->Arg(432);

static void BM_ClickModelFit(benchmark::State& state) {
  const InteractionLog log = synthetic(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_click_model(log));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(log.size()));
}
BENCHMARK(BM_ClickModelFit)->Arg(432)->Arg(4320)->Unit(benchmark::kMillisecond);

static void BM_WarmStartFit(benchmark::State& state) {
  const InteractionLog log = synthetic(432);
  const ClickFit cold = estimate_click_model(log);
  Rng rng(5);
  ClickFitOptions o;
  o.init_beta = cold.beta;
  o.init_click = cold.click;
  for (auto _ : state) {
    const InteractionLog draw = resample_users(log, rng);
    benchmark::DoNotOptimize(estimate_click_model(draw, o));
  }
}
BENCHMARK(BM_WarmStartFit)->Unit(benchmark::kMillisecond);

static void BM_Replay(benchmark::State& state) {
  RunConfig config;
  config.behavior = presets::pooled();
  config.algo = {3.0, 0.5};
  config.n_interactions = static_cast<std::size_t>(state.range(0));
  InteractionLog log;
  log.records = run(config).to_records("bench", config.algo);
  for (auto _ : state) {
    benchmark::DoNotOptimize(replay(log));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Replay)->Arg(500)->Arg(5000);
