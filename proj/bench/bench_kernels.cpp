// OpenMP kernels vs the serial reference. Run with OMP_NUM_THREADS set to
// compare scaling, e.g. OMP_NUM_THREADS=4 ./prism_bench.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "prism/kernels.hpp"
#include "prism/pca.hpp"

using namespace prism;

namespace {

std::vector<float> random_values(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
  std::vector<float> v(n);
  for (float& x : v) x = dist(rng);
  return v;
}

template <bool Parallel>
void BM_Conv2d(benchmark::State& state) {
  const std::size_t c = state.range(0);
  const Shape4 s{4, c, 32, 32};
  const ConvGeometry g{c, 3, 3, 1, 1};
  const auto in = random_values(s.count(), 1);
  const auto w = random_values(c * c * 9, 2);
  const auto b = random_values(c, 3);
  std::vector<float> out(s.n * c * 32 * 32);
  for (auto _ : state) {
    if constexpr (Parallel) kernels::conv2d(in, s, w, b, g, out);
    else reference::conv2d(in, s, w, b, g, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_BilinearResize(benchmark::State& state) {
  const Shape4 s{8, 3, 14, 14};
  const std::size_t size = state.range(0);
  const auto in = random_values(s.count(), 4);
  std::vector<float> out(s.n * s.c * size * size);
  for (auto _ : state) {
    if constexpr (Parallel) kernels::bilinear_resize(in, s, size, size, out);
    else reference::bilinear_resize(in, s, size, size, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_ChannelSum(benchmark::State& state) {
  const Shape4 s{8, std::size_t(state.range(0)), 28, 28};
  const auto in = random_values(s.count(), 5);
  std::vector<float> out(s.n * s.plane());
  for (auto _ : state) {
    if constexpr (Parallel) kernels::channel_sum(in, s, out);
    else reference::channel_sum(in, s, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_MaxPool(benchmark::State& state) {
  const Shape4 s{8, 64, 56, 56};
  const PoolGeometry g{};
  const auto in = random_values(s.count(), 6);
  std::vector<float> out(s.n * s.c * g.out_h(s.h) * g.out_w(s.w));
  for (auto _ : state) {
    if constexpr (Parallel) kernels::maxpool2d(in, s, g, out);
    else reference::maxpool2d(in, s, g, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_Svd(benchmark::State& state) {
  const std::size_t cols = state.range(0);
  const std::size_t rows = 4 * 14 * 14;
  const ObservationMatrix m(rows, cols, random_values(rows * cols, 7));
  for (auto _ : state) {
    auto r = svd(m, {.max_sweeps = 0, .parallel = Parallel});
    benchmark::DoNotOptimize(r.s.data());
  }
}

}  // namespace

BENCHMARK(BM_Conv2d<true>)->Name("conv2d/parallel")->Arg(16)->Arg(64);
BENCHMARK(BM_Conv2d<false>)->Name("conv2d/reference")->Arg(16)->Arg(64);
BENCHMARK(BM_BilinearResize<true>)->Name("bilinear/parallel")->Arg(224);
BENCHMARK(BM_BilinearResize<false>)->Name("bilinear/reference")->Arg(224);
BENCHMARK(BM_ChannelSum<true>)->Name("channel_sum/parallel")->Arg(256);
BENCHMARK(BM_ChannelSum<false>)->Name("channel_sum/reference")->Arg(256);
BENCHMARK(BM_MaxPool<true>)->Name("maxpool/parallel");
BENCHMARK(BM_MaxPool<false>)->Name("maxpool/reference");
BENCHMARK(BM_Svd<true>)->Name("svd/parallel")->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Svd<false>)->Name("svd/reference")->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
