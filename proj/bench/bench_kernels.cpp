// Fast sweeps vs OpenMP direct quadrature vs the serial reference.

#include <cmath>

#include <benchmark/benchmark.h>

#include "fw/grid.hpp"
#include "fw/nonlocal.hpp"

namespace {

struct Data {
  fw::GridFunction w, q;
  explicit Data(std::size_t n)
      : w(fw::GridFunction::sample(fw::Grid(20.0, n), [](double x) { return 0.1 * std::exp(-x * x); })),
        q(fw::GridFunction::sample(fw::Grid(20.0, n), [](double x) { return 1.0 + 0.05 * std::sin(x); })) {}
};

void kernels(benchmark::State& state, fw::KernelPath path) {
  const Data d(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fw::kernel_pair(d.w, d.q, path));
  state.SetComplexityN(state.range(0));
}

void BM_kernel_fast(benchmark::State& s) { kernels(s, fw::KernelPath::fast); }
void BM_kernel_direct(benchmark::State& s) { kernels(s, fw::KernelPath::direct); }
void BM_kernel_direct_serial(benchmark::State& s) { kernels(s, fw::KernelPath::direct_serial); }

void BM_holder_parallel(benchmark::State& state) {
  const Data d(static_cast<std::size_t>(state.range(0)));
  const std::size_t n = d.w.size();
  for (auto _ : state) benchmark::DoNotOptimize(fw::holder_seminorm(d.w, 0.5, n * n));
}

void BM_holder_serial(benchmark::State& state) {
  const Data d(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fw::holder_seminorm_serial(d.w, 0.5));
}

}  // namespace

BENCHMARK(BM_kernel_fast)->Arg(501)->Arg(1001)->Arg(2001)->Arg(4001)->Complexity();
BENCHMARK(BM_kernel_direct)->Arg(501)->Arg(1001)->Arg(2001)->Arg(4001)->Complexity();
BENCHMARK(BM_kernel_direct_serial)->Arg(501)->Arg(1001)->Arg(2001)->Arg(4001)->Complexity();
BENCHMARK(BM_holder_parallel)->Arg(1001)->Arg(2001);
BENCHMARK(BM_holder_serial)->Arg(1001)->Arg(2001);

BENCHMARK_MAIN();
