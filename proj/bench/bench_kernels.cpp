#include <benchmark/benchmark.h>

#include "ipman/kernels.hpp"
#include "ipman/objective.hpp"
#include "ipman/oracle.hpp"
#include "ipman/random.hpp"
#include "ipman/region.hpp"

namespace {

using namespace ipman;

// Shapes of the hidden layer in a stage-2 minibatch: batch x 64 times 64 x 64.
void BM_MatmulAbtSerial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  RandomStream rng(1);
  const Matrix2 a = rng.normal_matrix(n, 64);
  const Matrix2 b = rng.normal_matrix(64, 64);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::matmul_abt(a, b));
}

void BM_MatmulAbtOmp(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  RandomStream rng(1);
  const Matrix2 a = rng.normal_matrix(n, 64);
  const Matrix2 b = rng.normal_matrix(64, 64);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::omp::matmul_abt(a, b));
}

void BM_MatmulAtbSerial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  RandomStream rng(2);
  const Matrix2 a = rng.normal_matrix(n, 64);
  const Matrix2 b = rng.normal_matrix(n, 64);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::matmul_atb(a, b));
}

void BM_MatmulAtbOmp(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  RandomStream rng(2);
  const Matrix2 a = rng.normal_matrix(n, 64);
  const Matrix2 b = rng.normal_matrix(n, 64);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::omp::matmul_atb(a, b));
}

void BM_GridSerial(benchmark::State& state) {
  const Region region = l_shape();
  const Objective f = make_rosenbrock();
  const double step = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(serial::grid_optimize(region, f, step, 0.0));
}

void BM_GridOmp(benchmark::State& state) {
  const Region region = l_shape();
  const Objective f = make_rosenbrock();
  const double step = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(grid_optimize(region, f, step, 0.0));
}

}  // namespace

BENCHMARK(BM_MatmulAbtSerial)->Arg(128)->Arg(256)->Arg(1024);
BENCHMARK(BM_MatmulAbtOmp)->Arg(128)->Arg(256)->Arg(1024);
BENCHMARK(BM_MatmulAtbSerial)->Arg(128)->Arg(256)->Arg(1024);
BENCHMARK(BM_MatmulAtbOmp)->Arg(128)->Arg(256)->Arg(1024);
BENCHMARK(BM_GridSerial)->Arg(4)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridOmp)->Arg(4)->Arg(10)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
