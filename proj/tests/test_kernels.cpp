// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <omp.h>

#include "ahdr/kernels.hpp"
#include "test_util.hpp"

using namespace ahdr;
using namespace ahdr::kernels;

namespace {

// Direct convolution written independently of both library kernels.
std::vector<double> brute_conv(const ConvGeometry& g, const std::vector<double>& in, const std::vector<double>& w,
                               const std::vector<double>& b) {
  const long h = static_cast<long>(g.height), wd = static_cast<long>(g.width);
  const long k = static_cast<long>(g.kernel), d = static_cast<long>(g.dilation), p = static_cast<long>(g.padding());
  std::vector<double> out(g.batch * g.out_channels * g.pixels());
  for (std::size_t n = 0; n < g.batch; ++n)
    for (std::size_t o = 0; o < g.out_channels; ++o)
      for (long y = 0; y < h; ++y)
        for (long x = 0; x < wd; ++x) {
          double acc = b.empty() ? 0.0 : b[o];
          for (std::size_t c = 0; c < g.in_channels; ++c)
            for (long ky = 0; ky < k; ++ky)
              for (long kx = 0; kx < k; ++kx) {
                const long sy = y + ky * d - p, sx = x + kx * d - p;
                if (sy < 0 || sy >= h || sx < 0 || sx >= wd) continue;
                acc += w[((o * g.in_channels + c) * k + ky) * k + kx] *
                       in[((n * g.in_channels + c) * h + sy) * wd + sx];
              }
          out[((n * g.out_channels + o) * h + y) * wd + x] = acc;
        }
  return out;
}

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-1, 1);
  return v;
}

struct Geo {
  std::size_t n, ci, co, h, w, k, d;
};

class ConvKernels : public ::testing::TestWithParam<Geo> {};

}  // namespace

TEST_P(ConvKernels, ForwardMatchesBruteForce) {
  const Geo p = GetParam();
  const ConvGeometry g{p.n, p.ci, p.co, p.h, p.w, p.k, p.d};
  const auto in = random_vec(g.batch * g.in_channels * g.pixels(), 1);
  const auto w = random_vec(g.out_channels * g.patch(), 2);
  const auto b = random_vec(g.out_channels, 3);
  const auto expected = brute_conv(g, in, w, b);
  std::vector<double> fast(expected.size()), ref(expected.size());
  conv2d_forward<double>(g, in, w, b, fast);
  reference::conv2d_forward<double>(g, in, w, b, ref);
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_NEAR(fast[i], expected[i], 1e-12);
    EXPECT_NEAR(ref[i], expected[i], 1e-12);
  }
}

TEST_P(ConvKernels, BackwardMatchesReference) {
  const Geo p = GetParam();
  const ConvGeometry g{p.n, p.ci, p.co, p.h, p.w, p.k, p.d};
  const auto in = random_vec(g.batch * g.in_channels * g.pixels(), 4);
  const auto w = random_vec(g.out_channels * g.patch(), 5);
  const auto go = random_vec(g.batch * g.out_channels * g.pixels(), 6);
  // Non-zero starting buffers check accumulation.
  auto gi_fast = random_vec(in.size(), 7), gi_ref = gi_fast;
  auto gw_fast = random_vec(w.size(), 8), gw_ref = gw_fast;
  auto gb_fast = random_vec(g.out_channels, 9), gb_ref = gb_fast;
  conv2d_backward_input<double>(g, w, go, gi_fast);
  reference::conv2d_backward_input<double>(g, w, go, gi_ref);
  conv2d_backward_params<double>(g, in, go, gw_fast, gb_fast);
  reference::conv2d_backward_params<double>(g, in, go, gw_ref, gb_ref);
  for (std::size_t i = 0; i < gi_ref.size(); ++i) EXPECT_NEAR(gi_fast[i], gi_ref[i], 1e-11);
  for (std::size_t i = 0; i < gw_ref.size(); ++i) EXPECT_NEAR(gw_fast[i], gw_ref[i], 1e-10);
  for (std::size_t i = 0; i < gb_ref.size(); ++i) EXPECT_NEAR(gb_fast[i], gb_ref[i], 1e-11);
}

INSTANTIATE_TEST_SUITE_P(Shapes, ConvKernels,
                         ::testing::Values(Geo{1, 1, 1, 3, 3, 3, 1}, Geo{2, 3, 5, 7, 9, 3, 1}, Geo{1, 4, 6, 8, 8, 3, 2},
                                           Geo{2, 5, 3, 17, 5, 3, 2}, Geo{1, 7, 4, 6, 11, 1, 1},
                                           Geo{1, 19, 13, 9, 10, 3, 1}, Geo{1, 2, 2, 2, 2, 3, 2}));

TEST(ConvKernels, ImpulseThroughDilatedOnesKernel) {
  const ConvGeometry g{1, 1, 1, 9, 9, 3, 2};
  std::vector<float> in(81, 0.0f), w(9, 1.0f), b(1, 0.0f), out(81);
  in[4 * 9 + 4] = 1.0f;
  conv2d_forward<float>(g, in, w, b, out);
  int ones = 0;
  for (int y = 0; y < 9; ++y)
    for (int x = 0; x < 9; ++x) {
      const bool tap = (y == 2 || y == 4 || y == 6) && (x == 2 || x == 4 || x == 6);
      EXPECT_EQ(out[y * 9 + x], tap ? 1.0f : 0.0f) << y << "," << x;
      ones += out[y * 9 + x] == 1.0f;
    }
  EXPECT_EQ(ones, 9);
}

TEST(ConvKernels, FloatForwardIsBitIdenticalToReference) {
  const ConvGeometry g{1, 16, 16, 24, 24, 3, 2};
  Rng rng(3);
  std::vector<float> in(16 * 576), w(16 * 144), b(16), fast(16 * 576), ref(16 * 576);
  for (float& v : in) v = static_cast<float>(rng.uniform(-1, 1));
  for (float& v : w) v = static_cast<float>(rng.uniform(-1, 1));
  for (float& v : b) v = static_cast<float>(rng.uniform(-1, 1));
  conv2d_forward<float>(g, in, w, b, fast);
  reference::conv2d_forward<float>(g, in, w, b, ref);
  for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(fast[i], ref[i], 1e-4f);
}

TEST(ConvKernels, ResultsIndependentOfThreadCount) {
  const ConvGeometry g{2, 24, 32, 40, 40, 3, 2};
  const auto in = random_vec(g.batch * g.in_channels * g.pixels(), 11);
  const auto w = random_vec(g.out_channels * g.patch(), 12);
  const auto b = random_vec(g.out_channels, 13);
  const auto go = random_vec(g.batch * g.out_channels * g.pixels(), 14);
  const int saved = omp_get_max_threads();
  std::vector<std::vector<double>> outs;
  for (int threads : {1, 3}) {
    omp_set_num_threads(threads);
    std::vector<double> out(go.size()), gi(in.size()), gw(w.size()), gb(b.size());
    conv2d_forward<double>(g, in, w, b, out);
    conv2d_backward_input<double>(g, w, go, gi);
    conv2d_backward_params<double>(g, in, go, gw, gb);
    out.insert(out.end(), gi.begin(), gi.end());
    out.insert(out.end(), gw.begin(), gw.end());
    out.insert(out.end(), gb.begin(), gb.end());
    outs.push_back(out);
  }
  omp_set_num_threads(saved);
  EXPECT_EQ(outs[0], outs[1]);
}

TEST(Gemm, MatchesReferenceOnOddSizes) {
  for (const auto [m, n, k] : {std::array<std::size_t, 3>{1, 1, 1}, {5, 17, 3}, {13, 33, 300}, {64, 7, 129}}) {
    const auto a = random_vec(m * k, 21), b = random_vec(k * n, 22);
    auto c1 = random_vec(m * n, 23), c2 = c1;
    gemm_accumulate<double>(m, n, k, a.data(), k, b.data(), n, c1.data(), n);
    reference::gemm_accumulate<double>(m, n, k, a.data(), k, b.data(), n, c2.data(), n);
    for (std::size_t i = 0; i < c1.size(); ++i) EXPECT_NEAR(c1[i], c2[i], 1e-11) << m << "x" << n << "x" << k;
  }
}

TEST(Im2col, FoldsBackAsAdjoint) {
  // <im2col(x), y> == <x, col2im(y)> for random x, y.
  const ConvGeometry g{1, 3, 1, 5, 6, 3, 2};
  const auto x = random_vec(g.in_channels * g.pixels(), 31);
  const auto y = random_vec(g.patch() * g.pixels(), 32);
  std::vector<double> cols(y.size()), folded(x.size(), 0.0);
  im2col<double>(g, x.data(), cols.data());
  col2im_add<double>(g, y.data(), folded.data());
  double lhs = 0, rhs = 0;
  for (std::size_t i = 0; i < y.size(); ++i) lhs += cols[i] * y[i];
  for (std::size_t i = 0; i < x.size(); ++i) rhs += x[i] * folded[i];
  EXPECT_NEAR(lhs, rhs, 1e-10);
}
