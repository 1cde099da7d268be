// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#include "ahdr/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "ahdr/ops.hpp"

namespace ahdr {

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

template <typename T>
GradCheckResult check_leaf_gradient(const ScalarFn<T>& f, Tensor<T> leaf, T eps,
                                    const std::vector<std::size_t>& indices) {
  if (!leaf.requires_grad()) throw std::invalid_argument("check_leaf_gradient: leaf does not require grad");
  leaf.zero_grad();
  Array<T> analytic;
  {
    Tape<T> tape;
    Tensor<T> out = f(tape);
    tape.backward(out);
    analytic = leaf.has_grad() ? leaf.grad() : Array<T>(leaf.shape());
  }
  leaf.zero_grad();

  const auto evaluate = [&]() {
    Tape<T> tape(false);
    return static_cast<double>(item(f(tape)));
  };

  GradCheckResult result;
  double diff_sq = 0.0, analytic_sq = 0.0, numeric_sq = 0.0;
  Array<T>& values = leaf.mutable_value();
  const auto visit = [&](std::size_t i) {
    const T original = values[i];
    values[i] = original + eps;
    const double plus = evaluate();
    values[i] = original - eps;
    const double minus = evaluate();
    values[i] = original;
    const double numeric = (plus - minus) / (2.0 * static_cast<double>(eps));
    const double a = static_cast<double>(analytic[i]);
    diff_sq += (a - numeric) * (a - numeric);
    analytic_sq += a * a;
    numeric_sq += numeric * numeric;
    const double err = relative_error(a, numeric);
    if (err > result.max_rel_error || result.checked == 0) {
      result.max_rel_error = std::max(result.max_rel_error, err);
      result.worst_index = i;
      result.worst_analytic = static_cast<double>(analytic[i]);
      result.worst_numeric = numeric;
    }
    ++result.checked;
  };
  if (indices.empty()) {
    for (std::size_t i = 0; i < values.size(); ++i) visit(i);
  } else {
    for (std::size_t i : indices) visit(i);
  }
  const double scale = std::sqrt(std::max({analytic_sq, numeric_sq}));
  result.norm_rel_error = scale > 0.0 ? std::sqrt(diff_sq) / scale : 0.0;
  return result;
}

template <typename T>
double finite_diff_check(const std::function<Tensor<T>(Tape<T>&, const Tensor<T>&)>& f, const Array<T>& x,
                         T eps) {
  Tensor<T> leaf = Tensor<T>::parameter(x);
  const ScalarFn<T> g = [&](Tape<T>& tape) { return f(tape, leaf); };
  return check_leaf_gradient<T>(g, leaf, eps).max_rel_error;
}

template GradCheckResult check_leaf_gradient<float>(const ScalarFn<float>&, Tensor<float>, float,
                                                    const std::vector<std::size_t>&);
template GradCheckResult check_leaf_gradient<double>(const ScalarFn<double>&, Tensor<double>, double,
                                                     const std::vector<std::size_t>&);
template double finite_diff_check<float>(const std::function<Tensor<float>(Tape<float>&, const Tensor<float>&)>&,
                                         const Array<float>&, float);
template double finite_diff_check<double>(
    const std::function<Tensor<double>(Tape<double>&, const Tensor<double>&)>&, const Array<double>&, double);

}  // namespace ahdr
