// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace ahdr {

/// Whole file as bytes. Throws DataError with the path on failure.
std::string read_file(const std::filesystem::path& path);

/// Writes to a temporary sibling and renames it over `path`, so readers
/// never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace ahdr
