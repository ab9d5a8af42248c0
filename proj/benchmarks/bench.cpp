#include <benchmark/benchmark.h>

#include <cmath>
#include <cstdint>
#include <span>

#include "sublex/ambiguity_set.hpp"
#include "sublex/choquet.hpp"
#include "sublex/nested.hpp"
#include "sublex/quadrature.hpp"
#include "sublex/simulate.hpp"
#include "sublex/steering.hpp"
#include "sublex/sublinear.hpp"

namespace {

using namespace sublex;

AmbiguitySet gaussian_pair() {
  return AmbiguitySet(
      {Distribution::gaussian(-1.0, 1.0), Distribution::gaussian(1.0, 1.0)});
}

void BM_SimulateSteps(benchmark::State& state) {
  const AmbiguitySet fam = gaussian_pair();
  const TargetSequence targets = TargetSequence::constant(
      0.25, MeanFunctional{fam.mean_interval().first,
                           fam.mean_interval().second});
  const std::int64_t n = state.range(0);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    const Path p = simulate_path(fam, targets, n, seed++);
    benchmark::DoNotOptimize(p.running_mean.back());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_SimulateSteps)->Arg(1 << 12)->Arg(1 << 16);

void BM_Quadrature(benchmark::State& state) {
  const double tol = std::pow(10.0, -static_cast<double>(state.range(0)));
  for (auto _ : state) {
    const QuadratureResult r =
        integrate([](double x) { return std::exp(-x * x) * std::cos(3.0 * x); },
                  -8.0, 8.0, tol);
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(BM_Quadrature)->Arg(6)->Arg(10)->Arg(13);

void BM_UpperExpectation(benchmark::State& state) {
  const AmbiguitySet fam = gaussian_pair();
  const TestFunction f = TestFunction::scalar(
      [](double x) { return std::tanh(x); }, 1.0, 0, true);
  for (auto _ : state) {
    benchmark::DoNotOptimize(upper_expectation(fam, f, 1e-9));
  }
}
BENCHMARK(BM_UpperExpectation);

void BM_NestedTwoStage(benchmark::State& state) {
  const AmbiguitySet fam = gaussian_pair();
  const TestFunction f(
      2, [](std::span<const double> x) { return x[0] * x[1]; }, 2.0, 1, false);
  GridSpec grid;
  grid.nodes_per_axis = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(nested_expectation(fam, f, grid));
  }
}
BENCHMARK(BM_NestedTwoStage)->Arg(33)->Arg(65);

void BM_ChoquetUpper(benchmark::State& state) {
  const AmbiguitySet fam = gaussian_pair();
  const TestFunction f =
      TestFunction::scalar([](double x) { return std::abs(x); }, 1.0, 0, false);
  ChoquetOptions opts;
  opts.tol = 1e-6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(choquet_upper(fam, f, opts).value);
  }
}
BENCHMARK(BM_ChoquetUpper);

void BM_ScheduleOnes(benchmark::State& state) {
  const OscillationSchedule s = oscillation_schedule(20);
  const std::uint64_t span = static_cast<std::uint64_t>(s.total_length()) + 1;
  std::uint64_t u = 0x9E3779B97F4A7C15ull;
  for (auto _ : state) {
    u = u * 6364136223846793005ull + 1442695040888963407ull;
    benchmark::DoNotOptimize(s.ones_up_to(static_cast<std::int64_t>(u % span)));
  }
}
BENCHMARK(BM_ScheduleOnes);

}  // namespace

BENCHMARK_MAIN();
