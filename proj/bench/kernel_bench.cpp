// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include <vector>

#include "ahdr/kernels.hpp"
#include "ahdr/rng.hpp"

namespace {

using ahdr::kernels::ConvGeometry;

std::vector<float> random_vector(std::size_t n, std::uint64_t seed) {
  ahdr::Rng rng(seed);
  std::vector<float> v(n);
  for (float& x : v) x = static_cast<float>(rng.uniform(-1.0, 1.0));
  return v;
}

// Args: channels in, channels out, spatial size, dilation.
ConvGeometry geometry(const benchmark::State& state) {
  ConvGeometry g;
  g.batch = 1;
  g.in_channels = static_cast<std::size_t>(state.range(0));
  g.out_channels = static_cast<std::size_t>(state.range(1));
  g.height = g.width = static_cast<std::size_t>(state.range(2));
  g.kernel = 3;
  g.dilation = static_cast<std::size_t>(state.range(3));
  return g;
}

struct ConvBuffers {
  explicit ConvBuffers(const ConvGeometry& g)
      : input(random_vector(g.batch * g.in_channels * g.pixels(), 1)),
        weight(random_vector(g.out_channels * g.patch(), 2)),
        bias(random_vector(g.out_channels, 3)),
        grad_out(random_vector(g.batch * g.out_channels * g.pixels(), 4)),
        output(g.batch * g.out_channels * g.pixels()),
        grad_in(input.size()),
        grad_w(weight.size()),
        grad_b(bias.size()) {}
  std::vector<float> input, weight, bias, grad_out, output, grad_in, grad_w, grad_b;
};

void set_flops(benchmark::State& state, const ConvGeometry& g, double passes) {
  const double flops = 2.0 * static_cast<double>(g.batch * g.out_channels * g.pixels() * g.patch()) * passes;
  state.counters["flops"] = benchmark::Counter(flops, benchmark::Counter::kIsIterationInvariantRate);
}

template <bool kReference>
void BM_ConvForward(benchmark::State& state) {
  const ConvGeometry g = geometry(state);
  ConvBuffers b(g);
  for (auto _ : state) {
    if constexpr (kReference) {
      ahdr::kernels::reference::conv2d_forward<float>(g, b.input, b.weight, b.bias, b.output);
    } else {
      ahdr::kernels::conv2d_forward<float>(g, b.input, b.weight, b.bias, b.output);
    }
    benchmark::DoNotOptimize(b.output.data());
  }
  set_flops(state, g, 1.0);
}

template <bool kReference>
void BM_ConvBackward(benchmark::State& state) {
  const ConvGeometry g = geometry(state);
  ConvBuffers b(g);
  for (auto _ : state) {
    if constexpr (kReference) {
      ahdr::kernels::reference::conv2d_backward_input<float>(g, b.weight, b.grad_out, b.grad_in);
      ahdr::kernels::reference::conv2d_backward_params<float>(g, b.input, b.grad_out, b.grad_w, b.grad_b);
    } else {
      ahdr::kernels::conv2d_backward_input<float>(g, b.weight, b.grad_out, b.grad_in);
      ahdr::kernels::conv2d_backward_params<float>(g, b.input, b.grad_out, b.grad_w, b.grad_b);
    }
    benchmark::DoNotOptimize(b.grad_in.data());
    benchmark::DoNotOptimize(b.grad_w.data());
  }
  set_flops(state, g, 2.0);
}

template <bool kReference>
void BM_Gemm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::vector<float> a = random_vector(n * n, 5), b = random_vector(n * n, 6);
  std::vector<float> c(n * n);
  for (auto _ : state) {
    if constexpr (kReference) {
      ahdr::kernels::reference::gemm_accumulate<float>(n, n, n, a.data(), n, b.data(), n, c.data(), n);
    } else {
      ahdr::kernels::gemm_accumulate<float>(n, n, n, a.data(), n, b.data(), n, c.data(), n);
    }
    benchmark::DoNotOptimize(c.data());
  }
  state.counters["flops"] =
      benchmark::Counter(2.0 * static_cast<double>(n * n * n), benchmark::Counter::kIsIterationInvariantRate);
}

void conv_args(benchmark::internal::Benchmark* b) {
  b->Args({16, 16, 32, 1})->Args({16, 16, 32, 2})->Args({64, 64, 64, 2})->Args({192, 64, 64, 1});
  b->Unit(benchmark::kMillisecond);
}

BENCHMARK(BM_ConvForward<false>)->Name("conv_forward/parallel")->Apply(conv_args);
BENCHMARK(BM_ConvForward<true>)->Name("conv_forward/reference")->Apply(conv_args);
BENCHMARK(BM_ConvBackward<false>)->Name("conv_backward/parallel")->Apply(conv_args);
BENCHMARK(BM_ConvBackward<true>)->Name("conv_backward/reference")->Apply(conv_args);
BENCHMARK(BM_Gemm<false>)->Name("gemm/parallel")->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Gemm<true>)->Name("gemm/reference")->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
