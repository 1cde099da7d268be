// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "ahdr/tensor.hpp"

namespace ahdr {

/// Outcome of comparing taped gradients with central differences.
struct GradCheckResult {
  double max_rel_error = 0.0;
  /// ||a - n|| / max(||a||, ||n||) over the checked entries.
  double norm_rel_error = 0.0;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
};

/// Scalar-valued function of the current leaf values, evaluated on `tape`.
template <typename T>
using ScalarFn = std::function<Tensor<T>(Tape<T>&)>;

/// Compares d f / d leaf from one backward pass with central differences
/// (f(x+eps) - f(x-eps)) / 2eps, perturbing `leaf` in place and restoring it.
/// Error per element is |a - n| / max(|a|, |n|, 1e-8); the maximum is
/// reported. `indices` restricts the check to a subset (all when empty).
template <typename T>
GradCheckResult check_leaf_gradient(const ScalarFn<T>& f, Tensor<T> leaf, T eps,
                                    const std::vector<std::size_t>& indices = {});

/// Convenience form for a function of a single input array.
template <typename T>
double finite_diff_check(const std::function<Tensor<T>(Tape<T>&, const Tensor<T>&)>& f, const Array<T>& x,
                         T eps);

double relative_error(double analytic, double numeric);

}  // namespace ahdr
