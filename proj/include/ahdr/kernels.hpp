// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>

namespace ahdr::kernels {

/// Geometry of a stride-1, size-preserving 2-D convolution over an NCHW batch.
struct ConvGeometry {
  std::size_t batch = 1;
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  std::size_t height = 1;
  std::size_t width = 1;
  std::size_t kernel = 3;
  std::size_t dilation = 1;

  std::size_t padding() const { return dilation * (kernel - 1) / 2; }
  std::size_t taps() const { return kernel * kernel; }
  std::size_t patch() const { return in_channels * kernel * kernel; }
  std::size_t pixels() const { return height * width; }
};

// The kernels below parallelize only over independent outputs, so every
// element is reduced in the same order regardless of the thread count.

/// output = bias + weight (*) input. Overwrites `output`.
template <typename T>
void conv2d_forward(const ConvGeometry& g, std::span<const T> input, std::span<const T> weight,
                    std::span<const T> bias, std::span<T> output);

/// grad_input += transpose-conv(grad_output, weight).
template <typename T>
void conv2d_backward_input(const ConvGeometry& g, std::span<const T> weight,
                           std::span<const T> grad_output, std::span<T> grad_input);

/// grad_weight += grad_output x input correlation; grad_bias += sum(grad_output).
template <typename T>
void conv2d_backward_params(const ConvGeometry& g, std::span<const T> input,
                            std::span<const T> grad_output, std::span<T> grad_weight,
                            std::span<T> grad_bias);

/// C[M x N] += A[M x K] * B[K x N], row-major with leading dimensions.
template <typename T>
void gemm_accumulate(std::size_t m, std::size_t n, std::size_t k, const T* a, std::size_t lda,
                     const T* b, std::size_t ldb, T* c, std::size_t ldc);

/// Unfolds one image (C x H x W) into a (C*K*K) x (H*W) column matrix.
template <typename T>
void im2col(const ConvGeometry& g, const T* image, T* columns);

/// Folds a column matrix back onto one image, accumulating.
template <typename T>
void col2im_add(const ConvGeometry& g, const T* columns, T* image);

/// Serial, loop-per-definition implementations kept as the test oracle and
/// benchmark baseline for the kernels above.
namespace reference {

template <typename T>
void conv2d_forward(const ConvGeometry& g, std::span<const T> input, std::span<const T> weight,
                    std::span<const T> bias, std::span<T> output);

template <typename T>
void conv2d_backward_input(const ConvGeometry& g, std::span<const T> weight,
                           std::span<const T> grad_output, std::span<T> grad_input);

template <typename T>
void conv2d_backward_params(const ConvGeometry& g, std::span<const T> input,
                            std::span<const T> grad_output, std::span<T> grad_weight,
                            std::span<T> grad_bias);

template <typename T>
void gemm_accumulate(std::size_t m, std::size_t n, std::size_t k, const T* a, std::size_t lda,
                     const T* b, std::size_t ldb, T* c, std::size_t ldc);

}  // namespace reference

}  // namespace ahdr::kernels
