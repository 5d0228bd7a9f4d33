#include <benchmark/benchmark.h>

#include "eepc/baselines.hpp"
#include "eepc/game.hpp"
#include "eepc/scenario.hpp"

namespace {

eepc::NetworkScenario scenario(int k, int n) {
  eepc::ScenarioConfig c;
  c.k_cells = k;
  c.n_rbs = n;
  c.seed = 5;
  return eepc::generate(c);
}

void BM_RunGame(benchmark::State& state) {
  const auto scn = scenario(4, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(eepc::run_game(scn, eepc::EeParams{}));
}
BENCHMARK(BM_RunGame)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_RunSeGame(benchmark::State& state) {
  const auto scn = scenario(4, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(eepc::run_se_game(scn, eepc::EeParams{}));
}
BENCHMARK(BM_RunSeGame)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMicrosecond);

void BM_GridSearchSystemEe(benchmark::State& state) {
  const auto scn = scenario(2, 2);
  const eepc::GridOracleConfig cfg{.points_per_dim = static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(eepc::grid_search_system_ee(scn, eepc::EeParams{}, cfg));
}
BENCHMARK(BM_GridSearchSystemEe)->Arg(11)->Arg(21)->Unit(benchmark::kMillisecond);

}  // namespace
