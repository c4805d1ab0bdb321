// Serial reference vs OpenMP versions of the data-parallel kernels.

#include <benchmark/benchmark.h>

#include <omp.h>

#include "lslasso/harness.hpp"
#include "lslasso/losses.hpp"
#include "lslasso/parallel.hpp"

using namespace lslasso;

namespace {

SimSpec logistic_spec(long trials) {
  SimSpec s;
  s.N = 100;
  s.p = 8;
  s.s0 = 2;
  s.theta_star = alternating_theta(8, 2, 0.25);
  s.domain = ParamDomain::uniform_box(8, -0.5, 0.5);
  s.family = LossFamily::logistic({-4.001, 4.001});
  s.trials = trials;
  s.seed = 11;
  return s;
}

void BM_TailTrials(benchmark::State& state) {
  const SimSpec spec = logistic_spec(64);
  HarnessOptions o;
  o.threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(verify_tail_bounded(spec, 0.05, 0.05, o).violations);
  }
}
BENCHMARK(BM_TailTrials)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_CurvatureGrid(benchmark::State& state) {
  const LossFamily fam = LossFamily::logistic({-1.0, 1.0});
  omp_set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(curvature_constant(fam));
  omp_set_num_threads(omp_get_num_procs());
}
BENCHMARK(BM_CurvatureGrid)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_MapSerialVsParallel(benchmark::State& state) {
  const int threads = static_cast<int>(state.range(0));
  auto work = [](int i) {
    double acc = 0.0;
    for (int k = 0; k < 20000; ++k) acc += softplus(1e-4 * (i + k));
    return acc;
  };
  for (auto _ : state) {
    auto v = threads == 1 ? map_indices_serial<double>(256, work)
                          : map_indices_parallel<double>(256, threads, work);
    benchmark::DoNotOptimize(v.data());
  }
}
BENCHMARK(BM_MapSerialVsParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
