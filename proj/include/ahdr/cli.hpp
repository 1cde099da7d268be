// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>

namespace ahdr {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumeric = 3;

/// Entry point of the ahdr tool. Failures print one line starting with
/// "ahdr: error:" to `err`. No output files are touched unless every
/// argument and input has been validated.
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ahdr
