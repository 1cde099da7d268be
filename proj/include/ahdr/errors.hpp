// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace ahdr {

/// Raised when tensor extents disagree. `axis()` names the offending axis
/// ("batch", "channels", "height", "width", or an op-specific label).
class DimensionError : public std::invalid_argument {
 public:
  DimensionError(std::string axis, const std::string& what)
      : std::invalid_argument(what), axis_(std::move(axis)) {}
  const std::string& axis() const noexcept { return axis_; }

 private:
  std::string axis_;
};

/// Invalid configuration or argument values.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or missing files, manifest inconsistencies, I/O failures.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite losses or gradients.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ahdr
