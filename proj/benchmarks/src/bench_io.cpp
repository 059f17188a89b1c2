#include <benchmark/benchmark.h>

#include "mechpf/analysis.hpp"
#include "mechpf/network.hpp"
#include "mechpf/sweep_csv.hpp"
#include "mechpf/touchstone.hpp"
#include "reference.hpp"

namespace {

std::string reference_touchstone(int points) {
  const auto grid = mechpf::linear_grid(2.5e9, 3.8e9, points);
  return mechpf::write_touchstone(
      mechpf::touchstone_from_network(mechpf::build_ladder(bench::reference_ladder(), grid)));
}

void BM_TouchstoneParse(benchmark::State& state) {
  const auto text = reference_touchstone(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(mechpf::parse_touchstone(text));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_TouchstoneParse)->Arg(2001)->Arg(20001);

void BM_TouchstoneWrite(benchmark::State& state) {
  const auto rec = mechpf::parse_touchstone(reference_touchstone(2001));
  for (auto _ : state) benchmark::DoNotOptimize(mechpf::write_touchstone(rec));
}
BENCHMARK(BM_TouchstoneWrite);

void BM_SweepCsvRoundTrip(benchmark::State& state) {
  const auto sweep = mechpf::simulate_sweep(bench::reference_ladder(),
                                            mechpf::linear_grid(2.5e9, 3.8e9, 2001));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mechpf::read_sweep_csv(mechpf::write_sweep_csv(sweep)));
  }
}
BENCHMARK(BM_SweepCsvRoundTrip);

}  // namespace
