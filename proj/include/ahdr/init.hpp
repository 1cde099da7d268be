// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "ahdr/array.hpp"

namespace ahdr {

/// Glorot-uniform samples for a conv weight of shape (out, in, k, k):
/// U(-a, a) with a = sqrt(6 / (fan_in + fan_out)), fan_in = in*k*k,
/// fan_out = out*k*k. Reproducible per seed.
template <typename T>
Array<T> xavier_init(const Shape& weight_shape, std::uint64_t seed);

/// The bound a used by xavier_init.
double xavier_bound(const Shape& weight_shape);

}  // namespace ahdr
