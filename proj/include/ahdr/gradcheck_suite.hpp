// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ahdr {

enum class ErrorMetric {
  kElementwise,  // max over entries of |a - n| / max(|a|, |n|, 1e-8)
  kNormwise,     // max over leaves of ||a - n|| / max(||a||, ||n||)
};

/// One finite-difference comparison, reduced over all checked leaves.
struct GradCheckCase {
  std::string group;
  std::string name;
  ErrorMetric metric = ErrorMetric::kElementwise;
  double error = 0.0;
  /// Largest per-entry relative error, reported for both metrics.
  double max_rel_error = 0.0;
  double tolerance = 0.0;
  std::size_t checked = 0;
  /// Entry with the largest elementwise error.
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;

  bool passed() const { return error < tolerance && checked > 0; }
};

/// Single ops are scored elementwise; blocks and whole networks norm-wise.
inline constexpr double kOpTolerance = 1e-4;
inline constexpr double kNetworkTolerance = 1e-3;

/// Names accepted by run_gradcheck, in run order.
std::span<const std::string_view> gradcheck_groups();

/// Runs the named groups in double precision ("all" or empty selects every
/// group). Throws ConfigError on an unknown name.
std::vector<GradCheckCase> run_gradcheck(std::span<const std::string> groups, std::uint64_t seed = 7);

}  // namespace ahdr
