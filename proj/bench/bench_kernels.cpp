// Optimised kernels against their serial references. Thread count follows
// OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <vector>

#include "glass/coverage.hpp"
#include "glass/kernels.hpp"
#include "glass/reference.hpp"
#include "glass/rng.hpp"

using namespace glass;

namespace {

std::vector<float> random_floats(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<float> v(n);
  for (auto& x : v) x = static_cast<float>(rng.uniform01() - 0.5);
  return v;
}

struct ConvCase {
  int cin, cout, side;
  std::vector<float> in, weight, bias, out, grad_out, grad_w, grad_b, grad_in;

  explicit ConvCase(const benchmark::State& state)
      : cin(static_cast<int>(state.range(0))), cout(static_cast<int>(state.range(1))),
        side(static_cast<int>(state.range(2))) {
    const std::size_t plane = static_cast<std::size_t>(side) * side;
    in = random_floats(plane * cin, 1);
    weight = random_floats(static_cast<std::size_t>(cout) * cin * 9, 2);
    bias = random_floats(cout, 3);
    out.resize(plane * cout);
    grad_out = random_floats(plane * cout, 4);
    grad_w.assign(weight.size(), 0.0f);
    grad_b.assign(bias.size(), 0.0f);
    grad_in.resize(in.size());
  }
};

void conv_args(benchmark::internal::Benchmark* b) {
  b->Args({3, 16, 224})->Args({16, 32, 112})->Args({32, 64, 56});
}

void BM_ConvForward(benchmark::State& state) {
  ConvCase c(state);
  for (auto _ : state) {
    kernels::conv3x3_forward<float>(c.in, c.cin, c.side, c.side, c.weight, c.bias, c.cout, c.out);
    benchmark::DoNotOptimize(c.out.data());
  }
}
BENCHMARK(BM_ConvForward)->Apply(conv_args)->Unit(benchmark::kMillisecond);

void BM_ConvForwardReference(benchmark::State& state) {
  ConvCase c(state);
  for (auto _ : state) {
    reference::conv3x3_forward<float>(c.in, c.cin, c.side, c.side, c.weight, c.bias, c.cout, c.out);
    benchmark::DoNotOptimize(c.out.data());
  }
}
BENCHMARK(BM_ConvForwardReference)->Apply(conv_args)->Unit(benchmark::kMillisecond);

void BM_ConvBackward(benchmark::State& state) {
  ConvCase c(state);
  for (auto _ : state) {
    kernels::conv3x3_backward<float>(c.in, c.cin, c.side, c.side, c.weight, c.cout, c.grad_out, c.grad_w, c.grad_b,
                                     c.grad_in);
    benchmark::DoNotOptimize(c.grad_in.data());
  }
}
BENCHMARK(BM_ConvBackward)->Apply(conv_args)->Unit(benchmark::kMillisecond);

void BM_ConvBackwardReference(benchmark::State& state) {
  ConvCase c(state);
  for (auto _ : state) {
    reference::conv3x3_backward<float>(c.in, c.cin, c.side, c.side, c.weight, c.cout, c.grad_out, c.grad_w, c.grad_b,
                                       c.grad_in);
    benchmark::DoNotOptimize(c.grad_in.data());
  }
}
BENCHMARK(BM_ConvBackwardReference)->Apply(conv_args)->Unit(benchmark::kMillisecond);

void resize_args(benchmark::internal::Benchmark* b) { b->Args({448, 448})->Args({1080, 1920})->Args({4320, 7680}); }

template <bool Fast>
void BM_Resize(benchmark::State& state) {
  const int h = static_cast<int>(state.range(0)), w = static_cast<int>(state.range(1));
  const auto src = random_floats(static_cast<std::size_t>(3) * h * w, 5);
  std::vector<float> dst(3 * 224 * 224);
  for (auto _ : state) {
    if constexpr (Fast) {
      kernels::resize_bilinear(src, 3, h, w, dst, 224, 224);
    } else {
      reference::resize_bilinear(src, 3, h, w, dst, 224, 224);
    }
    benchmark::DoNotOptimize(dst.data());
  }
}
BENCHMARK(BM_Resize<true>)->Name("BM_Resize")->Apply(resize_args)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Resize<false>)->Name("BM_ResizeReference")->Apply(resize_args)->Unit(benchmark::kMicrosecond);

template <bool Fast>
void BM_CoverageSum(benchmark::State& state) {
  const int h = static_cast<int>(state.range(0)), w = static_cast<int>(state.range(1)), p = 224;
  std::vector<int> rows(h), cols(w);
  for (int y = 0; y < h; ++y) rows[y] = row_cover_count(y, h, p);
  for (int x = 0; x < w; ++x) cols[x] = row_cover_count(x, w, p);
  const double positions = static_cast<double>(h - p + 1) * (w - p + 1);
  for (auto _ : state) {
    const double s = Fast ? kernels::coverage_sum(rows, cols, positions, 10)
                          : reference::coverage_sum(rows, cols, positions, 10);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_CoverageSum<true>)->Name("BM_CoverageSum")->Args({768, 1024})->Args({720, 1280})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CoverageSum<false>)->Name("BM_CoverageSumReference")->Args({768, 1024})->Args({720, 1280})
    ->Unit(benchmark::kMillisecond);

void BM_MonteCarloCoverage(benchmark::State& state) {
  const CoverageQuery q{480, 640, 224, 6};
  for (auto _ : state) benchmark::DoNotOptimize(mc_coverage(q, static_cast<int>(state.range(0)), 1).percent);
}
BENCHMARK(BM_MonteCarloCoverage)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
