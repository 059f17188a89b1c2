#include <benchmark/benchmark.h>

#include "mechpf/fitting.hpp"
#include "mechpf/analysis.hpp"
#include "reference.hpp"

namespace {

void BM_FitBvd(benchmark::State& state) {
  const auto truth = bench::reference_ladder().series;
  const auto grid = mechpf::linear_grid(3.0e9, 3.6e9, 601);
  mechpf::FitProblem problem;
  problem.freqs_hz = grid;
  problem.kind = mechpf::ObservableKind::admittance;
  problem.target = mechpf::resonator_response(truth, problem.kind, grid, 50.0);
  auto start = truth;
  start.omega_m *= 1.01;
  start.k2 *= 1.1;
  start.q = mechpf::Quality::finite(600.0);
  start.c_g *= 0.9;
  problem.initial = start;
  for (auto _ : state) benchmark::DoNotOptimize(mechpf::fit_bvd(problem));
}
BENCHMARK(BM_FitBvd)->Unit(benchmark::kMillisecond);

void BM_FitLadder(benchmark::State& state) {
  const auto truth = bench::reference_ladder();
  const auto grid = mechpf::linear_grid(2.8e9, 3.6e9, 801);
  mechpf::FitProblem problem;
  problem.freqs_hz = grid;
  problem.kind = mechpf::ObservableKind::s21;
  problem.target = mechpf::ladder_response(truth, problem.kind, grid);
  auto start = truth;
  start.series.omega_m *= 1.005;
  start.shunt.omega_m *= 0.995;
  start.series.k2 *= 1.05;
  start.shunt.q = mechpf::Quality::finite(700.0);
  problem.initial = start;
  for (auto _ : state) benchmark::DoNotOptimize(mechpf::fit_ladder(problem));
}
BENCHMARK(BM_FitLadder)->Unit(benchmark::kMillisecond);

}  // namespace
