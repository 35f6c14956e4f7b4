#include <benchmark/benchmark.h>

#include <cmath>

#include "slipform/energy_densities.hpp"
#include "slipform/lavrentiev_lab.hpp"
#include "slipform/recovery_engine.hpp"
#include "slipform/strip_builder.hpp"

using namespace slipform;

namespace {

void BM_SoftDensity(benchmark::State &state) {
  const SlipSystem sys = SlipSystem::from_direction({1, 2});
  const Mat2 F = rotation(0.3) * Mat2{1.1, 0.4, -0.2, 0.9};
  const double eps = std::pow(10.0, -static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(soft_density(sys, F, eps));
}
BENCHMARK(BM_SoftDensity)->Arg(0)->Arg(3)->Arg(6);

void BM_EnergyOfMap(benchmark::State &state) {
  const LimitProfile u({0, 1, 2, 3}, {{2, 0}, {0, 2}, {2, 0}});
  const double h = 0.1 / static_cast<double>(state.range(0));
  const PiecewiseAffineMap map = build_recovery(SlipSystem::e2(), u, h).map;
  for (auto _ : state) benchmark::DoNotOptimize(energy_of_map(map));
  state.counters["cells"] = static_cast<double>(map.cells.size());
}
BENCHMARK(BM_EnergyOfMap)->Arg(1)->Arg(4)->Arg(16);

void BM_Transition(benchmark::State &state) {
  const SlipSystem sys = SlipSystem::from_direction({1, 1});
  for (auto _ : state) benchmark::DoNotOptimize(transition(sys, {{0.3, 0.5}, {-2.0, -1.0}, 0.1, 0}));
}
BENCHMARK(BM_Transition);

void BM_EvolveConstraintFamily(benchmark::State &state) {
  EvolveOptions opt;
  opt.nx = static_cast<std::size_t>(state.range(0));
  opt.ny = 21;
  const auto theta0 = [](double y) { return 0.5 * std::sin(0.3 * y); };
  for (auto _ : state) benchmark::DoNotOptimize(evolve_constraint_family(theta0, 0.1, 20.0, 0.05, opt));
}
BENCHMARK(BM_EvolveConstraintFamily)->Arg(101)->Arg(201)->Arg(401)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
