// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#include "ahdr/init.hpp"

#include <cmath>

#include "ahdr/rng.hpp"

namespace ahdr {

double xavier_bound(const Shape& s) {
  const double area = static_cast<double>(s.h * s.w);
  const double fan_in = static_cast<double>(s.c) * area;
  const double fan_out = static_cast<double>(s.n) * area;
  if (fan_in + fan_out <= 0.0) throw ConfigError("xavier_init: empty weight shape " + s.str());
  return std::sqrt(6.0 / (fan_in + fan_out));
}

template <typename T>
Array<T> xavier_init(const Shape& weight_shape, std::uint64_t seed) {
  const double bound = xavier_bound(weight_shape);
  Rng rng(seed);
  Array<T> out(weight_shape);
  for (T& v : out.span()) v = static_cast<T>(rng.uniform(-bound, bound));
  return out;
}

template Array<float> xavier_init<float>(const Shape&, std::uint64_t);
template Array<double> xavier_init<double>(const Shape&, std::uint64_t);

}  // namespace ahdr
