// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#include "ahdr/kernels.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ahdr::kernels {
namespace {

constexpr std::size_t kRowTile = 4;
#if defined(__AVX512F__)
constexpr std::size_t kVecBytes = 64;
#else
constexpr std::size_t kVecBytes = 32;
#endif
constexpr std::size_t kVecPerTile = 2;
template <typename T>
constexpr std::size_t kLanes = kVecBytes / sizeof(T);
template <typename T>
constexpr std::size_t kColTile = kVecPerTile * kLanes<T>;

template <typename T>
using Vec [[gnu::vector_size(kVecBytes)]] = T;

// Below this many multiply-adds a GEMM runs on the calling thread.
constexpr std::size_t kParallelWork = std::size_t{1} << 16;

template <typename T>
inline Vec<T> load(const T* p) {
  Vec<T> v;
  std::memcpy(&v, p, sizeof(v));
  return v;
}

template <typename T>
inline void store(T* p, const Vec<T>& v) {
  std::memcpy(p, &v, sizeof(v));
}

// Rows x (Vecs * lanes) block of C held in registers across the whole K loop.
template <typename T, std::size_t Rows, std::size_t Vecs>
void micro_tile(std::size_t k, const T* __restrict a, std::size_t lda, const T* __restrict b,
                std::size_t ldb, T* __restrict c, std::size_t ldc) {
  constexpr std::size_t L = kLanes<T>;
  Vec<T> acc[Rows][Vecs];
  for (std::size_t i = 0; i < Rows; ++i)
    for (std::size_t v = 0; v < Vecs; ++v) acc[i][v] = load<T>(c + i * ldc + v * L);
  for (std::size_t p = 0; p < k; ++p) {
    const T* brow = b + p * ldb;
    Vec<T> bv[Vecs];
    for (std::size_t v = 0; v < Vecs; ++v) bv[v] = load<T>(brow + v * L);
    for (std::size_t i = 0; i < Rows; ++i) {
      const T av = a[i * lda + p];
      for (std::size_t v = 0; v < Vecs; ++v) acc[i][v] += av * bv[v];
    }
  }
  for (std::size_t i = 0; i < Rows; ++i)
    for (std::size_t v = 0; v < Vecs; ++v) store<T>(c + i * ldc + v * L, acc[i][v]);
}

template <typename T>
void scalar_tile(std::size_t mr, std::size_t nr, std::size_t k, const T* a, std::size_t lda,
                 const T* b, std::size_t ldb, T* c, std::size_t ldc) {
  for (std::size_t i = 0; i < mr; ++i) {
    for (std::size_t j = 0; j < nr; ++j) {
      T acc = c[i * ldc + j];
      for (std::size_t p = 0; p < k; ++p) acc += a[i * lda + p] * b[p * ldb + j];
      c[i * ldc + j] = acc;
    }
  }
}

template <typename T, std::size_t Rows>
void row_tile(std::size_t vecs, std::size_t k, const T* a, std::size_t lda, const T* b,
              std::size_t ldb, T* c, std::size_t ldc) {
  static_assert(kVecPerTile == 2);
  if (vecs == 2) micro_tile<T, Rows, 2>(k, a, lda, b, ldb, c, ldc);
  else if (vecs == 1) micro_tile<T, Rows, 1>(k, a, lda, b, ldb, c, ldc);
}

// Any tile of at most kRowTile x kColTile; full vectors go through the
// register kernel, leftover columns through the scalar loop.
template <typename T>
void any_tile(std::size_t mr, std::size_t nr, std::size_t k, const T* a, std::size_t lda,
              const T* b, std::size_t ldb, T* c, std::size_t ldc) {
  static_assert(kRowTile == 4);
  const std::size_t vecs = nr / kLanes<T>;
  if (vecs > 0) {
    switch (mr) {
      case 4: row_tile<T, 4>(vecs, k, a, lda, b, ldb, c, ldc); break;
      case 3: row_tile<T, 3>(vecs, k, a, lda, b, ldb, c, ldc); break;
      case 2: row_tile<T, 2>(vecs, k, a, lda, b, ldb, c, ldc); break;
      case 1: row_tile<T, 1>(vecs, k, a, lda, b, ldb, c, ldc); break;
      default: break;
    }
  }
  const std::size_t done = vecs * kLanes<T>;
  if (done < nr) scalar_tile<T>(mr, nr - done, k, a, lda, b + done, ldb, c + done, ldc);
}

// Valid output range [lo, hi) along one axis for a tap offset.
inline void valid_range(std::ptrdiff_t offset, std::size_t extent, std::size_t& lo, std::size_t& hi) {
  const auto n = static_cast<std::ptrdiff_t>(extent);
  lo = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(-offset, 0, n));
  hi = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(n - offset, 0, n));
}

template <typename T>
void im2row(const ConvGeometry& g, const T* image, T* rows) {
  // rows is (H*W) x (C*K*K): the transpose of im2col.
  const std::size_t patch = g.patch();
  const std::size_t hw = g.pixels();
  const auto pad = static_cast<std::ptrdiff_t>(g.padding());
  const auto height = static_cast<std::ptrdiff_t>(g.height);
  const auto width = static_cast<std::ptrdiff_t>(g.width);
#pragma omp parallel for schedule(static) if (hw * patch > kParallelWork)
  for (std::ptrdiff_t pix = 0; pix < static_cast<std::ptrdiff_t>(hw); ++pix) {
    const std::ptrdiff_t y = pix / width;
    const std::ptrdiff_t x = pix % width;
    T* row = rows + static_cast<std::size_t>(pix) * patch;
    std::size_t col = 0;
    for (std::size_t ch = 0; ch < g.in_channels; ++ch) {
      const T* plane = image + ch * hw;
      for (std::size_t ky = 0; ky < g.kernel; ++ky) {
        const std::ptrdiff_t sy = y + static_cast<std::ptrdiff_t>(ky * g.dilation) - pad;
        for (std::size_t kx = 0; kx < g.kernel; ++kx, ++col) {
          const std::ptrdiff_t sx = x + static_cast<std::ptrdiff_t>(kx * g.dilation) - pad;
          row[col] = (sy >= 0 && sy < height && sx >= 0 && sx < width) ? plane[sy * width + sx] : T{0};
        }
      }
    }
  }
}

}  // namespace

template <typename T>
void gemm_accumulate(std::size_t m, std::size_t n, std::size_t k, const T* a, std::size_t lda,
                     const T* b, std::size_t ldb, T* c, std::size_t ldc) {
  constexpr std::size_t NR = kColTile<T>;
  // K is split into chunks whose B panels fit in L1. Chunks run in order, so
  // each element of C still sums its products in ascending k.
  constexpr std::size_t KC = 256;
  const auto row_blocks = static_cast<std::ptrdiff_t>((m + kRowTile - 1) / kRowTile);
  const auto col_blocks = static_cast<std::ptrdiff_t>((n + NR - 1) / NR);
  const bool parallel = m * n * std::min(k, KC) > kParallelWork;
  for (std::size_t k0 = 0; k0 < k; k0 += KC) {
    const std::size_t kc = std::min(KC, k - k0);
    // Column blocks outermost: one kc x NR panel of B stays hot across row tiles.
#pragma omp parallel for collapse(2) schedule(static) if (parallel)
    for (std::ptrdiff_t bj = 0; bj < col_blocks; ++bj) {
      for (std::ptrdiff_t bi = 0; bi < row_blocks; ++bi) {
        const std::size_t i0 = static_cast<std::size_t>(bi) * kRowTile;
        const std::size_t j0 = static_cast<std::size_t>(bj) * NR;
        const std::size_t mr = std::min(kRowTile, m - i0);
        const std::size_t nr = std::min(NR, n - j0);
        any_tile<T>(mr, nr, kc, a + i0 * lda + k0, lda, b + k0 * ldb + j0, ldb, c + i0 * ldc + j0, ldc);
      }
    }
  }
}

template <typename T>
void im2col(const ConvGeometry& g, const T* image, T* columns) {
  const std::size_t hw = g.pixels();
  const std::size_t pad = g.padding();
  const auto rows = static_cast<std::ptrdiff_t>(g.patch());
#pragma omp parallel for schedule(static) if (hw * g.patch() > kParallelWork)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    const std::size_t ch = static_cast<std::size_t>(r) / g.taps();
    const std::size_t tap = static_cast<std::size_t>(r) % g.taps();
    const auto dy = static_cast<std::ptrdiff_t>((tap / g.kernel) * g.dilation) - static_cast<std::ptrdiff_t>(pad);
    const auto dx = static_cast<std::ptrdiff_t>((tap % g.kernel) * g.dilation) - static_cast<std::ptrdiff_t>(pad);
    const T* plane = image + ch * hw;
    T* out = columns + static_cast<std::size_t>(r) * hw;
    std::fill(out, out + hw, T{0});
    std::size_t y0, y1, x0, x1;
    valid_range(dy, g.height, y0, y1);
    valid_range(dx, g.width, x0, x1);
    for (std::size_t y = y0; y < y1; ++y) {
      const T* src = plane + (static_cast<std::ptrdiff_t>(y) + dy) * static_cast<std::ptrdiff_t>(g.width) + dx;
      T* dst = out + y * g.width;
      for (std::size_t x = x0; x < x1; ++x) dst[x] = src[x];
    }
  }
}

template <typename T>
void col2im_add(const ConvGeometry& g, const T* columns, T* image) {
  const std::size_t hw = g.pixels();
  const std::size_t pad = g.padding();
  const auto channels = static_cast<std::ptrdiff_t>(g.in_channels);
  // One channel per thread; taps accumulate in a fixed order.
#pragma omp parallel for schedule(static) if (hw * g.patch() > kParallelWork)
  for (std::ptrdiff_t ch = 0; ch < channels; ++ch) {
    T* plane = image + static_cast<std::size_t>(ch) * hw;
    for (std::size_t tap = 0; tap < g.taps(); ++tap) {
      const auto dy = static_cast<std::ptrdiff_t>((tap / g.kernel) * g.dilation) - static_cast<std::ptrdiff_t>(pad);
      const auto dx = static_cast<std::ptrdiff_t>((tap % g.kernel) * g.dilation) - static_cast<std::ptrdiff_t>(pad);
      const T* src = columns + (static_cast<std::size_t>(ch) * g.taps() + tap) * hw;
      std::size_t y0, y1, x0, x1;
      valid_range(dy, g.height, y0, y1);
      valid_range(dx, g.width, x0, x1);
      for (std::size_t y = y0; y < y1; ++y) {
        T* dst = plane + (static_cast<std::ptrdiff_t>(y) + dy) * static_cast<std::ptrdiff_t>(g.width) + dx;
        const T* row = src + y * g.width;
        for (std::size_t x = x0; x < x1; ++x) dst[x] += row[x];
      }
    }
  }
}

template <typename T>
void conv2d_forward(const ConvGeometry& g, std::span<const T> input, std::span<const T> weight,
                    std::span<const T> bias, std::span<T> output) {
  const std::size_t hw = g.pixels();
  const bool pointwise = g.kernel == 1;
  std::vector<T> columns(pointwise ? 0 : g.patch() * hw);
  for (std::size_t n = 0; n < g.batch; ++n) {
    const T* image = input.data() + n * g.in_channels * hw;
    T* out = output.data() + n * g.out_channels * hw;
    for (std::size_t oc = 0; oc < g.out_channels; ++oc) std::fill(out + oc * hw, out + (oc + 1) * hw, bias[oc]);
    const T* cols = image;
    if (!pointwise) {
      im2col(g, image, columns.data());
      cols = columns.data();
    }
    gemm_accumulate(g.out_channels, hw, g.patch(), weight.data(), g.patch(), cols, hw, out, hw);
  }
}

template <typename T>
void conv2d_backward_input(const ConvGeometry& g, std::span<const T> weight,
                           std::span<const T> grad_output, std::span<T> grad_input) {
  const std::size_t hw = g.pixels();
  const std::size_t patch = g.patch();
  std::vector<T> weight_t(patch * g.out_channels);
  for (std::size_t oc = 0; oc < g.out_channels; ++oc)
    for (std::size_t r = 0; r < patch; ++r) weight_t[r * g.out_channels + oc] = weight[oc * patch + r];
  const bool pointwise = g.kernel == 1;
  std::vector<T> columns(pointwise ? 0 : patch * hw);
  for (std::size_t n = 0; n < g.batch; ++n) {
    const T* gout = grad_output.data() + n * g.out_channels * hw;
    T* gin = grad_input.data() + n * g.in_channels * hw;
    if (pointwise) {
      gemm_accumulate(patch, hw, g.out_channels, weight_t.data(), g.out_channels, gout, hw, gin, hw);
    } else {
      std::fill(columns.begin(), columns.end(), T{0});
      gemm_accumulate(patch, hw, g.out_channels, weight_t.data(), g.out_channels, gout, hw, columns.data(), hw);
      col2im_add(g, columns.data(), gin);
    }
  }
}

template <typename T>
void conv2d_backward_params(const ConvGeometry& g, std::span<const T> input,
                            std::span<const T> grad_output, std::span<T> grad_weight,
                            std::span<T> grad_bias) {
  const std::size_t hw = g.pixels();
  const std::size_t patch = g.patch();
  std::vector<T> rows(patch * hw);
  for (std::size_t n = 0; n < g.batch; ++n) {
    const T* image = input.data() + n * g.in_channels * hw;
    const T* gout = grad_output.data() + n * g.out_channels * hw;
    im2row(g, image, rows.data());
    gemm_accumulate(g.out_channels, patch, hw, gout, hw, rows.data(), patch, grad_weight.data(), patch);
  }
  if (grad_bias.empty()) return;
  const auto out_channels = static_cast<std::ptrdiff_t>(g.out_channels);
#pragma omp parallel for schedule(static) if (g.batch * g.out_channels * hw > kParallelWork)
  for (std::ptrdiff_t oc = 0; oc < out_channels; ++oc) {
    T acc = grad_bias[static_cast<std::size_t>(oc)];
    for (std::size_t n = 0; n < g.batch; ++n) {
      const T* gout = grad_output.data() + (n * g.out_channels + static_cast<std::size_t>(oc)) * hw;
      for (std::size_t p = 0; p < hw; ++p) acc += gout[p];
    }
    grad_bias[static_cast<std::size_t>(oc)] = acc;
  }
}

namespace reference {

template <typename T>
void conv2d_forward(const ConvGeometry& g, std::span<const T> input, std::span<const T> weight,
                    std::span<const T> bias, std::span<T> output) {
  const auto pad = static_cast<std::ptrdiff_t>(g.padding());
  const auto height = static_cast<std::ptrdiff_t>(g.height);
  const auto width = static_cast<std::ptrdiff_t>(g.width);
  for (std::size_t n = 0; n < g.batch; ++n)
    for (std::size_t oc = 0; oc < g.out_channels; ++oc)
      for (std::ptrdiff_t y = 0; y < height; ++y)
        for (std::ptrdiff_t x = 0; x < width; ++x) {
          T acc = bias[oc];
          for (std::size_t ic = 0; ic < g.in_channels; ++ic)
            for (std::size_t ky = 0; ky < g.kernel; ++ky)
              for (std::size_t kx = 0; kx < g.kernel; ++kx) {
                const std::ptrdiff_t sy = y + static_cast<std::ptrdiff_t>(ky * g.dilation) - pad;
                const std::ptrdiff_t sx = x + static_cast<std::ptrdiff_t>(kx * g.dilation) - pad;
                if (sy < 0 || sy >= height || sx < 0 || sx >= width) continue;
                acc += weight[((oc * g.in_channels + ic) * g.kernel + ky) * g.kernel + kx] *
                       input[((n * g.in_channels + ic) * g.height + static_cast<std::size_t>(sy)) * g.width +
                             static_cast<std::size_t>(sx)];
              }
          output[((n * g.out_channels + oc) * g.height + static_cast<std::size_t>(y)) * g.width +
                 static_cast<std::size_t>(x)] = acc;
        }
}

template <typename T>
void conv2d_backward_input(const ConvGeometry& g, std::span<const T> weight,
                           std::span<const T> grad_output, std::span<T> grad_input) {
  const auto pad = static_cast<std::ptrdiff_t>(g.padding());
  const auto height = static_cast<std::ptrdiff_t>(g.height);
  const auto width = static_cast<std::ptrdiff_t>(g.width);
  for (std::size_t n = 0; n < g.batch; ++n)
    for (std::size_t ic = 0; ic < g.in_channels; ++ic)
      for (std::ptrdiff_t y = 0; y < height; ++y)
        for (std::ptrdiff_t x = 0; x < width; ++x) {
          T acc{0};
          for (std::size_t oc = 0; oc < g.out_channels; ++oc)
            for (std::size_t ky = 0; ky < g.kernel; ++ky)
              for (std::size_t kx = 0; kx < g.kernel; ++kx) {
                // Output pixel (oy, ox) read this input pixel through tap (ky, kx).
                const std::ptrdiff_t oy = y - static_cast<std::ptrdiff_t>(ky * g.dilation) + pad;
                const std::ptrdiff_t ox = x - static_cast<std::ptrdiff_t>(kx * g.dilation) + pad;
                if (oy < 0 || oy >= height || ox < 0 || ox >= width) continue;
                acc += weight[((oc * g.in_channels + ic) * g.kernel + ky) * g.kernel + kx] *
                       grad_output[((n * g.out_channels + oc) * g.height + static_cast<std::size_t>(oy)) * g.width +
                                   static_cast<std::size_t>(ox)];
              }
          grad_input[((n * g.in_channels + ic) * g.height + static_cast<std::size_t>(y)) * g.width +
                     static_cast<std::size_t>(x)] += acc;
        }
}

template <typename T>
void conv2d_backward_params(const ConvGeometry& g, std::span<const T> input,
                            std::span<const T> grad_output, std::span<T> grad_weight,
                            std::span<T> grad_bias) {
  const auto pad = static_cast<std::ptrdiff_t>(g.padding());
  const auto height = static_cast<std::ptrdiff_t>(g.height);
  const auto width = static_cast<std::ptrdiff_t>(g.width);
  for (std::size_t oc = 0; oc < g.out_channels; ++oc) {
    for (std::size_t ic = 0; ic < g.in_channels; ++ic)
      for (std::size_t ky = 0; ky < g.kernel; ++ky)
        for (std::size_t kx = 0; kx < g.kernel; ++kx) {
          T acc{0};
          for (std::size_t n = 0; n < g.batch; ++n)
            for (std::ptrdiff_t y = 0; y < height; ++y)
              for (std::ptrdiff_t x = 0; x < width; ++x) {
                const std::ptrdiff_t sy = y + static_cast<std::ptrdiff_t>(ky * g.dilation) - pad;
                const std::ptrdiff_t sx = x + static_cast<std::ptrdiff_t>(kx * g.dilation) - pad;
                if (sy < 0 || sy >= height || sx < 0 || sx >= width) continue;
                acc += grad_output[((n * g.out_channels + oc) * g.height + static_cast<std::size_t>(y)) * g.width +
                                   static_cast<std::size_t>(x)] *
                       input[((n * g.in_channels + ic) * g.height + static_cast<std::size_t>(sy)) * g.width +
                             static_cast<std::size_t>(sx)];
              }
          grad_weight[((oc * g.in_channels + ic) * g.kernel + ky) * g.kernel + kx] += acc;
        }
    if (!grad_bias.empty()) {
      T acc{0};
      for (std::size_t n = 0; n < g.batch; ++n)
        for (std::size_t p = 0; p < g.pixels(); ++p) acc += grad_output[(n * g.out_channels + oc) * g.pixels() + p];
      grad_bias[oc] += acc;
    }
  }
}

template <typename T>
void gemm_accumulate(std::size_t m, std::size_t n, std::size_t k, const T* a, std::size_t lda,
                     const T* b, std::size_t ldb, T* c, std::size_t ldc) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      T acc = c[i * ldc + j];
      for (std::size_t p = 0; p < k; ++p) acc += a[i * lda + p] * b[p * ldb + j];
      c[i * ldc + j] = acc;
    }
}

}  // namespace reference

#define AHDR_INSTANTIATE_KERNELS(T)                                                                       \
  template void conv2d_forward<T>(const ConvGeometry&, std::span<const T>, std::span<const T>,            \
                                  std::span<const T>, std::span<T>);                                     \
  template void conv2d_backward_input<T>(const ConvGeometry&, std::span<const T>, std::span<const T>,     \
                                         std::span<T>);                                                  \
  template void conv2d_backward_params<T>(const ConvGeometry&, std::span<const T>, std::span<const T>,    \
                                          std::span<T>, std::span<T>);                                   \
  template void gemm_accumulate<T>(std::size_t, std::size_t, std::size_t, const T*, std::size_t,          \
                                   const T*, std::size_t, T*, std::size_t);                              \
  template void im2col<T>(const ConvGeometry&, const T*, T*);                                             \
  template void col2im_add<T>(const ConvGeometry&, const T*, T*);                                         \
  template void reference::conv2d_forward<T>(const ConvGeometry&, std::span<const T>, std::span<const T>, \
                                             std::span<const T>, std::span<T>);                          \
  template void reference::conv2d_backward_input<T>(const ConvGeometry&, std::span<const T>,              \
                                                    std::span<const T>, std::span<T>);                   \
  template void reference::conv2d_backward_params<T>(const ConvGeometry&, std::span<const T>,             \
                                                     std::span<const T>, std::span<T>, std::span<T>);    \
  template void reference::gemm_accumulate<T>(std::size_t, std::size_t, std::size_t, const T*,            \
                                              std::size_t, const T*, std::size_t, T*, std::size_t);

AHDR_INSTANTIATE_KERNELS(float)
AHDR_INSTANTIATE_KERNELS(double)

#undef AHDR_INSTANTIATE_KERNELS

}  // namespace ahdr::kernels
