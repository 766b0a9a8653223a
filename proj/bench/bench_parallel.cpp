// Serial reference against the OpenMP kernels. The second benchmark argument
// selects the path: 0 serial, 1 parallel.

#include <benchmark/benchmark.h>

#include <algorithm>
#include <vector>

#include "entamp/dicke.hpp"
#include "entamp/io.hpp"
#include "entamp/leakage.hpp"
#include "entamp/noise.hpp"
#include "entamp/protocol.hpp"
#include "entamp/sweep.hpp"

using namespace entamp;

namespace {

Execution mode(const benchmark::State& state) {
  return state.range(1) == 0 ? Execution::serial : Execution::parallel;
}

const std::vector<ParameterSet>& table() {
  static const auto rows = read_parameter_table(std::string(ENTAMP_DATA_DIR) + "/n_sweep.csv");
  return rows;
}

const ParameterSet& row(int n) {
  const auto& rows = table();
  return *std::find_if(rows.begin(), rows.end(), [n](const ParameterSet& p) { return p.n_atoms == n; });
}

void BM_MonteCarlo(benchmark::State& state) {
  const auto& p = row(static_cast<int>(state.range(0)));
  NoiseConfig noise = NoiseConfig::combined();
  noise.trials = 16;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mc_fidelity(p.cavity(), p.schedule(), noise, mode(state)));
  }
  state.SetItemsProcessed(state.iterations() * noise.trials);
}
BENCHMARK(BM_MonteCarlo)->ArgsProduct({{100, 500}, {0, 1}})->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_Table(benchmark::State& state) {
  const auto& rows = table();
  const std::vector<ParameterSet> head(rows.begin(), rows.begin() + state.range(0));
  SweepOptions opts;
  opts.exec = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(run_table(head, opts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Table)->ArgsProduct({{8}, {0, 1}})->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_Leakage(benchmark::State& state) {
  const auto& p = row(static_cast<int>(state.range(0)));
  LeakageOptions opts;
  opts.trials = 8;
  opts.exec = mode(state);
  const std::vector<double> grid = {10.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        leakage_tradeoff(p.cavity(), p.schedule(), MirrorConfig::from_ppm(5, 59), grid, opts));
  }
}
BENCHMARK(BM_Leakage)->ArgsProduct({{100}, {0, 1}})->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_Husimi(benchmark::State& state) {
  const auto& p = row(static_cast<int>(state.range(0)));
  const DickeState psi = run_protocol(p.cavity(), p.schedule());
  for (auto _ : state) benchmark::DoNotOptimize(husimi_map(psi, 128, 256, mode(state)));
  state.SetItemsProcessed(state.iterations() * 128 * 256);
}
BENCHMARK(BM_Husimi)->ArgsProduct({{100, 1000}, {0, 1}})->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
