// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#include "ahdr/array.hpp"

#include <cmath>
#include <cstring>

namespace ahdr {

void require_same_shape(const Shape& a, const Shape& b, const std::string& op) {
  const auto fail = [&](const char* axis) {
    throw DimensionError(axis, op + ": " + axis + " mismatch between " + a.str() + " and " + b.str());
  };
  if (a.n != b.n) fail("batch");
  if (a.c != b.c) fail("channels");
  if (a.h != b.h) fail("height");
  if (a.w != b.w) fail("width");
}

template <typename T>
Array<T> channel_slice(const Array<T>& a, std::size_t begin, std::size_t end) {
  const Shape& s = a.shape();
  if (begin > end || end > s.c) {
    throw DimensionError("channels", "channel slice [" + std::to_string(begin) + ", " + std::to_string(end) +
                                         ") out of range for " + s.str());
  }
  Array<T> out(Shape{s.n, end - begin, s.h, s.w});
  const std::size_t block = (end - begin) * s.plane();
  for (std::size_t n = 0; n < s.n; ++n) {
    std::memcpy(out.data() + n * block, a.data() + a.index(n, begin, 0, 0), block * sizeof(T));
  }
  return out;
}

template <typename T>
Array<T> channel_concat(std::span<const Array<T>> parts) {
  if (parts.empty()) throw DimensionError("channels", "concat of zero parts");
  const Shape& first = parts.front().shape();
  std::size_t channels = 0;
  for (const Array<T>& p : parts) {
    const Shape& s = p.shape();
    if (s.n != first.n) throw DimensionError("batch", "concat: batch mismatch " + s.str() + " vs " + first.str());
    if (s.h != first.h) throw DimensionError("height", "concat: height mismatch " + s.str() + " vs " + first.str());
    if (s.w != first.w) throw DimensionError("width", "concat: width mismatch " + s.str() + " vs " + first.str());
    channels += s.c;
  }
  Array<T> out(Shape{first.n, channels, first.h, first.w});
  for (std::size_t n = 0; n < first.n; ++n) {
    std::size_t offset = 0;
    for (const Array<T>& p : parts) {
      const std::size_t block = p.shape().c * p.shape().plane();
      std::memcpy(out.data() + out.index(n, offset, 0, 0), p.data() + n * block, block * sizeof(T));
      offset += p.shape().c;
    }
  }
  return out;
}

template <typename T>
Array<T> batch_stack(std::span<const Array<T>> parts) {
  if (parts.empty()) throw DimensionError("batch", "stack of zero parts");
  const Shape& first = parts.front().shape();
  std::vector<T> data;
  data.reserve(first.numel() * parts.size());
  std::size_t n = 0;
  for (const Array<T>& p : parts) {
    Shape s = p.shape();
    s.n = first.n;
    require_same_shape(s, first, "batch_stack");
    if (p.shape().n != first.n) throw DimensionError("batch", "batch_stack: batch extents differ");
    data.insert(data.end(), p.span().begin(), p.span().end());
    n += p.shape().n;
  }
  return Array<T>(Shape{n, first.c, first.h, first.w}, std::move(data));
}

template <typename T>
Array<T> batch_item(const Array<T>& a, std::size_t n) {
  const Shape& s = a.shape();
  if (n >= s.n) throw DimensionError("batch", "batch index " + std::to_string(n) + " out of range for " + s.str());
  const std::size_t block = s.c * s.plane();
  std::vector<T> data(a.data() + n * block, a.data() + (n + 1) * block);
  return Array<T>(Shape{1, s.c, s.h, s.w}, std::move(data));
}

template <typename T>
bool all_finite(const Array<T>& a) {
  for (T v : a.span())
    if (!std::isfinite(v)) return false;
  return true;
}

#define AHDR_INSTANTIATE_ARRAY(T)                                              \
  template Array<T> channel_slice<T>(const Array<T>&, std::size_t, std::size_t); \
  template Array<T> channel_concat<T>(std::span<const Array<T>>);               \
  template Array<T> batch_stack<T>(std::span<const Array<T>>);                  \
  template Array<T> batch_item<T>(const Array<T>&, std::size_t);                \
  template bool all_finite<T>(const Array<T>&);

AHDR_INSTANTIATE_ARRAY(float)
AHDR_INSTANTIATE_ARRAY(double)

#undef AHDR_INSTANTIATE_ARRAY

}  // namespace ahdr
