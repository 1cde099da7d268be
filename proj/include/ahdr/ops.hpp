// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ahdr/tensor.hpp"

namespace ahdr {

/// Stride-1 square convolution with size-preserving zero padding.
struct ConvSpec {
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  std::size_t kernel_size = 3;
  std::size_t dilation = 1;

  /// Odd kernels only; output extents equal input extents.
  std::size_t padding() const { return dilation * (kernel_size - 1) / 2; }
  Shape weight_shape() const { return {out_channels, in_channels, kernel_size, kernel_size}; }
  Shape bias_shape() const { return {1, out_channels, 1, 1}; }
  void validate() const;
};

/// Cross-correlation (no kernel flip) with dilation-spaced taps. The bias is
/// stored as (1, out_channels, 1, 1).
template <typename T>
Tensor<T> conv2d(Tape<T>& tape, const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& bias,
                 const ConvSpec& spec);

template <typename T>
Tensor<T> relu(Tape<T>& tape, const Tensor<T>& x);

template <typename T>
Tensor<T> sigmoid(Tape<T>& tape, const Tensor<T>& x);

/// Elementwise clamp. Gradient passes where lo <= x <= hi.
template <typename T>
Tensor<T> clamp(Tape<T>& tape, const Tensor<T>& x, T lo, T hi);

/// |x| with subgradient 0 at x == 0.
template <typename T>
Tensor<T> abs(Tape<T>& tape, const Tensor<T>& x);

template <typename T>
Tensor<T> square(Tape<T>& tape, const Tensor<T>& x);

template <typename T>
Tensor<T> scale(Tape<T>& tape, const Tensor<T>& x, T factor);

template <typename T>
Tensor<T> add(Tape<T>& tape, const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
Tensor<T> sub(Tape<T>& tape, const Tensor<T>& a, const Tensor<T>& b);

/// Pointwise (Hadamard) product.
template <typename T>
Tensor<T> mul(Tape<T>& tape, const Tensor<T>& a, const Tensor<T>& b);

/// Parts must agree on batch, height and width; part k lands in its own
/// contiguous channel block, in order.
template <typename T>
Tensor<T> concat_channels(Tape<T>& tape, std::span<const Tensor<T>> parts);

template <typename T>
Tensor<T> concat_channels(Tape<T>& tape, std::initializer_list<Tensor<T>> parts) {
  const std::vector<Tensor<T>> v(parts);
  return concat_channels<T>(tape, std::span<const Tensor<T>>(v));
}

/// Channels [begin, end).
template <typename T>
Tensor<T> slice_channels(Tape<T>& tape, const Tensor<T>& x, std::size_t begin, std::size_t end);

/// Sum of all elements as a (1,1,1,1) scalar.
template <typename T>
Tensor<T> sum(Tape<T>& tape, const Tensor<T>& x);

/// Mean of all elements as a (1,1,1,1) scalar.
template <typename T>
Tensor<T> mean(Tape<T>& tape, const Tensor<T>& x);

/// Elementwise map y = f(x) with derivative df(x, y). Used for scalar
/// curves like the mu-law tonemapper.
template <typename T, typename F, typename DF>
Tensor<T> map_elementwise(Tape<T>& tape, const Tensor<T>& x, F f, DF df) {
  Array<T> out(x.shape());
  const Array<T>& in = x.value();
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = f(in[i]);
  Tensor<T> xin = x;
  return tape.record(std::move(out), {&x}, [xin, df](const Array<T>& y, const Array<T>& g) mutable {
    if (!xin.requires_grad()) return;
    Array<T>& gx = xin.grad_buffer();
    const Array<T>& xv = xin.value();
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * df(xv[i], y[i]);
  });
}

/// Scalar value of a (1,1,1,1) tensor.
template <typename T>
T item(const Tensor<T>& x) {
  if (x.shape().numel() != 1) throw DimensionError("numel", "item() on non-scalar tensor " + x.shape().str());
  return x.value()[0];
}

}  // namespace ahdr
