// Serial reference vs OpenMP kernels.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "hybridode/kernels.hpp"

using namespace hybridode;

namespace {

std::vector<double> random_entries(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

template <auto Kernel>
void BM_matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_entries(n * n, 1), b = random_entries(n * n, 2);
  std::vector<double> c(n * n);
  for (auto _ : state) {
    Kernel(a, b, c, n, n, n);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * n * n * n);
}

const Dataset& decay_data() {
  static const Dataset ds = [] {
    const IvpProblem p = linear_decay_forced();
    return make_dataset(integrate(p, StepConfig{.dt = 0.005}), p.input);
  }();
  return ds;
}

template <auto Kernel>
void BM_population_mse(benchmark::State& state) {
  std::vector<FeedForwardNet> pop;
  for (std::int64_t i = 0; i < state.range(0); ++i) pop.push_back(init_weights({2, 10, 1}, i));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(pop, decay_data()));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void BM_em_paths(benchmark::State& state) {
  const SdeProblem sde = scalar_sde(-0.1, 0.1, 1.0, 1.0);
  const StepConfig cfg{.dt = 0.01, .method = Method::euler_maruyama, .seed = 1};
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(sde, cfg, state.range(0)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_matmul<kernels::matmul_serial>)->Name("matmul/serial")->Arg(99)->Arg(256);
BENCHMARK(BM_matmul<kernels::matmul_parallel>)->Name("matmul/parallel")->Arg(99)->Arg(256)->UseRealTime();
BENCHMARK(BM_population_mse<kernels::population_mse_serial>)->Name("population_mse/serial")->Arg(250);
BENCHMARK(BM_population_mse<kernels::population_mse_parallel>)->Name("population_mse/parallel")->Arg(250)->UseRealTime();
BENCHMARK(BM_em_paths<kernels::em_paths_serial>)->Name("em_paths/serial")->Arg(10000);
BENCHMARK(BM_em_paths<kernels::em_paths_parallel>)->Name("em_paths/parallel")->Arg(10000)->UseRealTime();

BENCHMARK_MAIN();
