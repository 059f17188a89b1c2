#include <benchmark/benchmark.h>

#include "mechpf/analysis.hpp"
#include "mechpf/network.hpp"
#include "reference.hpp"

namespace {

void BM_LadderSweep(benchmark::State& state) {
  const auto spec = bench::reference_ladder();
  const auto grid = mechpf::linear_grid(2.5e9, 3.8e9, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto net = mechpf::build_ladder(spec, grid);
    benchmark::DoNotOptimize(mechpf::abcd_to_s(net));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LadderSweep)->Arg(201)->Arg(2001)->Arg(20001);

void BM_AbcdToS(benchmark::State& state) {
  const auto spec = bench::reference_ladder();
  const double f = 3.1e9;
  const auto net = mechpf::build_ladder(spec, std::vector<double>{f});
  const auto abcd = net.chain().front();
  for (auto _ : state) benchmark::DoNotOptimize(mechpf::abcd_to_s(abcd, spec.z0));
}
BENCHMARK(BM_AbcdToS);

void BM_SimulateSweepWithT1(benchmark::State& state) {
  const auto spec = bench::reference_ladder();
  const auto grid = mechpf::linear_grid(2.5e9, 3.8e9, 2001);
  const mechpf::ReadoutSystem sys{mechpf::kTwoPi * 3.18e9, mechpf::kTwoPi * 2.68e9,
                                  mechpf::kTwoPi * 10e6, mechpf::kTwoPi * 10e6, 50.0};
  for (auto _ : state) benchmark::DoNotOptimize(mechpf::simulate_sweep(spec, grid, sys));
}
BENCHMARK(BM_SimulateSweepWithT1);

}  // namespace
