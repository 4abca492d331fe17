// Parallel kernels against their serial references, and FFT against direct
// convolution, across grid sizes.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "nlfkpp/convolution.hpp"
#include "nlfkpp/kernels.hpp"

using namespace nlfkpp;

namespace {

std::vector<double> field(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(0.0, 2.0);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

template <bool Parallel>
void BM_ConvolvePeriodic(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const KernelWeights w = discrete_weights(Kernel::uniform(), 10.0 / static_cast<double>(n));
  const auto u = field(n);
  std::vector<double> out(n);
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::convolve_periodic(w, u, out);
    else
      kernels::serial::convolve_periodic(w, u, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_Laplacian(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto u = field(n);
  std::vector<double> out(n);
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::laplacian(u, 0.01, 1.0, true, 0.0, 0.0, out);
    else
      kernels::serial::laplacian(u, 0.01, 1.0, true, 0.0, 0.0, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_ClampedPower(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto u = field(n);
  std::vector<double> out(n);
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::clamped_power(u, 1.7, out);
    else
      kernels::serial::clamped_power(u, 1.7, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_Convolver(benchmark::State& state, ConvolutionMethod method) {
  const int n = static_cast<int>(state.range(0));
  const Grid1D g(-5, 5, n, Periodic{});
  Convolver conv(Kernel::logistic(), g, method);
  const auto u = field(g.node_count());
  std::vector<double> out(g.node_count());
  for (auto _ : state) {
    conv.apply(u, 0.0, 0.0, out);
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(BM_ConvolvePeriodic<false>)->Name("convolve_periodic/serial")->RangeMultiplier(4)->Range(256, 16384);
BENCHMARK(BM_ConvolvePeriodic<true>)->Name("convolve_periodic/omp")->RangeMultiplier(4)->Range(256, 16384);
BENCHMARK(BM_Laplacian<false>)->Name("laplacian/serial")->RangeMultiplier(8)->Range(1024, 1 << 20);
BENCHMARK(BM_Laplacian<true>)->Name("laplacian/omp")->RangeMultiplier(8)->Range(1024, 1 << 20);
BENCHMARK(BM_ClampedPower<false>)->Name("clamped_power/serial")->RangeMultiplier(8)->Range(1024, 1 << 20);
BENCHMARK(BM_ClampedPower<true>)->Name("clamped_power/omp")->RangeMultiplier(8)->Range(1024, 1 << 20);
BENCHMARK_CAPTURE(BM_Convolver, fft, ConvolutionMethod::FFT)->RangeMultiplier(4)->Range(256, 16384);
BENCHMARK_CAPTURE(BM_Convolver, direct, ConvolutionMethod::Direct)->RangeMultiplier(4)->Range(256, 16384);

BENCHMARK_MAIN();
