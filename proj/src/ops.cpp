// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#include "ahdr/ops.hpp"

#include <cmath>
#include <cstring>

#include "ahdr/kernels.hpp"

namespace ahdr {

void ConvSpec::validate() const {
  if (in_channels == 0 || out_channels == 0) throw ConfigError("conv: channel counts must be positive");
  if (kernel_size == 0 || kernel_size % 2 == 0) throw ConfigError("conv: kernel size must be odd");
  if (dilation == 0) throw ConfigError("conv: dilation must be >= 1");
}

template <typename T>
Tensor<T> conv2d(Tape<T>& tape, const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& bias,
                 const ConvSpec& spec) {
  spec.validate();
  const Shape& in = input.shape();
  if (in.c != spec.in_channels) {
    throw DimensionError("channels", "conv2d: input has " + std::to_string(in.c) + " channels, expected " +
                                         std::to_string(spec.in_channels));
  }
  const Shape ws = weight.shape();
  if (ws.n != spec.out_channels) throw DimensionError("out_channels", "conv2d: weight shape " + ws.str() + " vs spec");
  if (ws.c != spec.in_channels) throw DimensionError("in_channels", "conv2d: weight shape " + ws.str() + " vs spec");
  if (ws.h != spec.kernel_size || ws.w != spec.kernel_size) {
    throw DimensionError("kernel", "conv2d: weight shape " + ws.str() + " vs kernel " + std::to_string(spec.kernel_size));
  }
  if (bias.shape().numel() != spec.out_channels) {
    throw DimensionError("bias", "conv2d: bias shape " + bias.shape().str() + " vs " +
                                     std::to_string(spec.out_channels) + " output channels");
  }
  const kernels::ConvGeometry geo{in.n, spec.in_channels, spec.out_channels, in.h, in.w, spec.kernel_size,
                                  spec.dilation};
  Array<T> out(Shape{in.n, spec.out_channels, in.h, in.w});
  kernels::conv2d_forward<T>(geo, input.value().span(), weight.value().span(), bias.value().span(), out.span());

  Tensor<T> x = input, w = weight, b = bias;
  return tape.record(std::move(out), {&input, &weight, &bias},
                     [x, w, b, geo](const Array<T>&, const Array<T>& g) mutable {
                       if (x.requires_grad()) {
                         kernels::conv2d_backward_input<T>(geo, w.value().span(), g.span(), x.grad_buffer().span());
                       }
                       if (w.requires_grad() || b.requires_grad()) {
                         Array<T> scratch_w, scratch_b;
                         std::span<T> gw, gb;
                         if (w.requires_grad()) {
                           gw = w.grad_buffer().span();
                         } else {
                           scratch_w = Array<T>(w.shape());
                           gw = scratch_w.span();
                         }
                         if (b.requires_grad()) gb = b.grad_buffer().span();
                         kernels::conv2d_backward_params<T>(geo, x.value().span(), g.span(), gw, gb);
                       }
                     });
}

template <typename T>
Tensor<T> relu(Tape<T>& tape, const Tensor<T>& x) {
  return map_elementwise(
      tape, x, [](T v) { return v > T{0} ? v : T{0}; }, [](T v, T) { return v > T{0} ? T{1} : T{0}; });
}

template <typename T>
Tensor<T> sigmoid(Tape<T>& tape, const Tensor<T>& x) {
  return map_elementwise(
      tape, x,
      [](T v) {
        // Split by sign so exp never overflows.
        if (v >= T{0}) return T{1} / (T{1} + std::exp(-v));
        const T e = std::exp(v);
        return e / (T{1} + e);
      },
      [](T, T y) { return y * (T{1} - y); });
}

template <typename T>
Tensor<T> clamp(Tape<T>& tape, const Tensor<T>& x, T lo, T hi) {
  return map_elementwise(
      tape, x, [lo, hi](T v) { return v < lo ? lo : (v > hi ? hi : v); },
      [lo, hi](T v, T) { return (v >= lo && v <= hi) ? T{1} : T{0}; });
}

template <typename T>
Tensor<T> abs(Tape<T>& tape, const Tensor<T>& x) {
  return map_elementwise(
      tape, x, [](T v) { return std::abs(v); },
      [](T v, T) { return v > T{0} ? T{1} : (v < T{0} ? T{-1} : T{0}); });
}

template <typename T>
Tensor<T> square(Tape<T>& tape, const Tensor<T>& x) {
  return map_elementwise(
      tape, x, [](T v) { return v * v; }, [](T v, T) { return T{2} * v; });
}

template <typename T>
Tensor<T> scale(Tape<T>& tape, const Tensor<T>& x, T factor) {
  return map_elementwise(
      tape, x, [factor](T v) { return v * factor; }, [factor](T, T) { return factor; });
}

namespace {

template <typename T, typename F, typename GA, typename GB>
Tensor<T> binary(Tape<T>& tape, const Tensor<T>& a, const Tensor<T>& b, const char* name, F f, GA ga, GB gb) {
  require_same_shape(a.shape(), b.shape(), name);
  Array<T> out(a.shape());
  const Array<T>& av = a.value();
  const Array<T>& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(av[i], bv[i]);
  Tensor<T> ta = a, tb = b;
  return tape.record(std::move(out), {&a, &b}, [ta, tb, ga, gb](const Array<T>&, const Array<T>& g) mutable {
    // Read values before touching grad buffers: a and b may be the same tensor.
    const Array<T>& av = ta.value();
    const Array<T>& bv = tb.value();
    if (ta.requires_grad()) {
      Array<T>& gx = ta.grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += ga(g[i], av[i], bv[i]);
    }
    if (tb.requires_grad()) {
      Array<T>& gx = tb.grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += gb(g[i], av[i], bv[i]);
    }
  });
}

}  // namespace

template <typename T>
Tensor<T> add(Tape<T>& tape, const Tensor<T>& a, const Tensor<T>& b) {
  return binary(
      tape, a, b, "add", [](T x, T y) { return x + y; }, [](T g, T, T) { return g; }, [](T g, T, T) { return g; });
}

template <typename T>
Tensor<T> sub(Tape<T>& tape, const Tensor<T>& a, const Tensor<T>& b) {
  return binary(
      tape, a, b, "sub", [](T x, T y) { return x - y; }, [](T g, T, T) { return g; }, [](T g, T, T) { return -g; });
}

template <typename T>
Tensor<T> mul(Tape<T>& tape, const Tensor<T>& a, const Tensor<T>& b) {
  return binary(
      tape, a, b, "mul", [](T x, T y) { return x * y; }, [](T g, T, T y) { return g * y; },
      [](T g, T x, T) { return g * x; });
}

template <typename T>
Tensor<T> concat_channels(Tape<T>& tape, std::span<const Tensor<T>> parts) {
  std::vector<Array<T>> values;
  values.reserve(parts.size());
  for (const Tensor<T>& p : parts) values.push_back(p.value());
  Array<T> out = channel_concat<T>(values);
  std::vector<const Tensor<T>*> inputs;
  for (const Tensor<T>& p : parts) inputs.push_back(&p);
  std::vector<Tensor<T>> captured(parts.begin(), parts.end());
  return tape.record(std::move(out), inputs, [captured](const Array<T>&, const Array<T>& g) mutable {
    const Shape& gs = g.shape();
    std::size_t offset = 0;
    for (Tensor<T>& p : captured) {
      const std::size_t c = p.shape().c;
      if (p.requires_grad()) {
        Array<T>& gp = p.grad_buffer();
        const std::size_t block = c * gs.plane();
        for (std::size_t n = 0; n < gs.n; ++n) {
          const T* src = g.data() + g.index(n, offset, 0, 0);
          T* dst = gp.data() + n * block;
          for (std::size_t i = 0; i < block; ++i) dst[i] += src[i];
        }
      }
      offset += c;
    }
  });
}

template <typename T>
Tensor<T> slice_channels(Tape<T>& tape, const Tensor<T>& x, std::size_t begin, std::size_t end) {
  Array<T> out = channel_slice(x.value(), begin, end);
  Tensor<T> xin = x;
  return tape.record(std::move(out), {&x}, [xin, begin](const Array<T>&, const Array<T>& g) mutable {
    if (!xin.requires_grad()) return;
    Array<T>& gx = xin.grad_buffer();
    const Shape& gs = g.shape();
    const std::size_t block = gs.c * gs.plane();
    for (std::size_t n = 0; n < gs.n; ++n) {
      T* dst = gx.data() + gx.index(n, begin, 0, 0);
      const T* src = g.data() + n * block;
      for (std::size_t i = 0; i < block; ++i) dst[i] += src[i];
    }
  });
}

namespace {

template <typename T>
Tensor<T> reduce_scaled(Tape<T>& tape, const Tensor<T>& x, T factor) {
  // Accumulate in double for both precisions; fixed order.
  double acc = 0.0;
  for (T v : x.value().span()) acc += static_cast<double>(v);
  Array<T> out(Shape{1, 1, 1, 1}, static_cast<T>(acc * static_cast<double>(factor)));
  Tensor<T> xin = x;
  return tape.record(std::move(out), {&x}, [xin, factor](const Array<T>&, const Array<T>& g) mutable {
    if (!xin.requires_grad()) return;
    const T gv = g[0] * factor;
    for (T& v : xin.grad_buffer().span()) v += gv;
  });
}

}  // namespace

template <typename T>
Tensor<T> sum(Tape<T>& tape, const Tensor<T>& x) {
  return reduce_scaled(tape, x, T{1});
}

template <typename T>
Tensor<T> mean(Tape<T>& tape, const Tensor<T>& x) {
  const std::size_t n = x.shape().numel();
  if (n == 0) throw DimensionError("numel", "mean of an empty tensor");
  return reduce_scaled(tape, x, T{1} / static_cast<T>(n));
}

#define AHDR_INSTANTIATE_OPS(T)                                                                              \
  template Tensor<T> conv2d<T>(Tape<T>&, const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, const ConvSpec&); \
  template Tensor<T> relu<T>(Tape<T>&, const Tensor<T>&);                                                   \
  template Tensor<T> sigmoid<T>(Tape<T>&, const Tensor<T>&);                                                \
  template Tensor<T> clamp<T>(Tape<T>&, const Tensor<T>&, T, T);                                            \
  template Tensor<T> abs<T>(Tape<T>&, const Tensor<T>&);                                                    \
  template Tensor<T> square<T>(Tape<T>&, const Tensor<T>&);                                                 \
  template Tensor<T> scale<T>(Tape<T>&, const Tensor<T>&, T);                                               \
  template Tensor<T> add<T>(Tape<T>&, const Tensor<T>&, const Tensor<T>&);                                  \
  template Tensor<T> sub<T>(Tape<T>&, const Tensor<T>&, const Tensor<T>&);                                  \
  template Tensor<T> mul<T>(Tape<T>&, const Tensor<T>&, const Tensor<T>&);                                  \
  template Tensor<T> concat_channels<T>(Tape<T>&, std::span<const Tensor<T>>);                              \
  template Tensor<T> slice_channels<T>(Tape<T>&, const Tensor<T>&, std::size_t, std::size_t);               \
  template Tensor<T> sum<T>(Tape<T>&, const Tensor<T>&);                                                    \
  template Tensor<T> mean<T>(Tape<T>&, const Tensor<T>&);

AHDR_INSTANTIATE_OPS(float)
AHDR_INSTANTIATE_OPS(double)

#undef AHDR_INSTANTIATE_OPS

}  // namespace ahdr
