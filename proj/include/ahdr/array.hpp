// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ahdr/errors.hpp"

namespace ahdr {

/// Extents of a rank-4 NCHW array.
struct Shape {
  std::size_t n = 0;
  std::size_t c = 0;
  std::size_t h = 0;
  std::size_t w = 0;

  constexpr std::size_t numel() const { return n * c * h * w; }
  constexpr std::size_t plane() const { return h * w; }
  friend constexpr bool operator==(const Shape&, const Shape&) = default;

  std::string str() const {
    return "(" + std::to_string(n) + ", " + std::to_string(c) + ", " +
           std::to_string(h) + ", " + std::to_string(w) + ")";
  }
};

/// Throws DimensionError naming the first axis on which `a` and `b` differ.
void require_same_shape(const Shape& a, const Shape& b, const std::string& op);

/// Dense row-major NCHW storage. Plain value type; autodiff lives in Tensor.
template <typename T>
class Array {
 public:
  using value_type = T;

  Array() = default;
  explicit Array(Shape shape, T fill = T{0}) : shape_(shape), data_(shape.numel(), fill) {}
  Array(Shape shape, std::vector<T> data) : shape_(shape), data_(std::move(data)) {
    if (data_.size() != shape_.numel()) {
      throw DimensionError("data", "array data length " + std::to_string(data_.size()) +
                                       " does not match shape " + shape_.str());
    }
  }

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::span<T> span() { return data_; }
  std::span<const T> span() const { return data_; }
  const std::vector<T>& vec() const { return data_; }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::size_t index(std::size_t n, std::size_t c, std::size_t y, std::size_t x) const {
    return ((n * shape_.c + c) * shape_.h + y) * shape_.w + x;
  }
  T& at(std::size_t n, std::size_t c, std::size_t y, std::size_t x) { return data_[index(n, c, y, x)]; }
  const T& at(std::size_t n, std::size_t c, std::size_t y, std::size_t x) const {
    return data_[index(n, c, y, x)];
  }

  std::span<T> plane(std::size_t n, std::size_t c) {
    return std::span<T>(data_).subspan(index(n, c, 0, 0), shape_.plane());
  }
  std::span<const T> plane(std::size_t n, std::size_t c) const {
    return std::span<const T>(data_).subspan(index(n, c, 0, 0), shape_.plane());
  }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  friend bool operator==(const Array& a, const Array& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  Shape shape_{};
  std::vector<T> data_;
};

/// Element type conversion (float <-> double).
template <typename To, typename From>
Array<To> cast(const Array<From>& a) {
  std::vector<To> out(a.size());
  std::transform(a.span().begin(), a.span().end(), out.begin(), [](From v) { return static_cast<To>(v); });
  return Array<To>(a.shape(), std::move(out));
}

/// Channel block [begin, end) of every batch entry.
template <typename T>
Array<T> channel_slice(const Array<T>& a, std::size_t begin, std::size_t end);

/// Concatenation along the channel axis.
template <typename T>
Array<T> channel_concat(std::span<const Array<T>> parts);

/// Stacks equally shaped arrays along the batch axis.
template <typename T>
Array<T> batch_stack(std::span<const Array<T>> parts);

/// Batch entry `n` as a batch-1 array.
template <typename T>
Array<T> batch_item(const Array<T>& a, std::size_t n);

/// True if every element is finite.
template <typename T>
bool all_finite(const Array<T>& a);

}  // namespace ahdr
