// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "ahdr/array.hpp"

namespace ahdr {

struct PpmImage {
  Array<float> pixels;  // (1, 3, H, W) scaled to [0, 1]
  int maxval = 255;
};

/// Binary P6. Samples are 1 byte for maxval < 256, else 2 bytes big-endian.
PpmImage decode_ppm(std::string_view bytes, const std::string& origin = "<memory>");
std::string encode_ppm(const Array<float>& pixels, int bits = 8);
PpmImage read_ppm(const std::filesystem::path& path);
/// Values are clamped to [0, 1] and rounded to the nearest level.
void write_ppm(const std::filesystem::path& path, const Array<float>& pixels, int bits = 8);

/// Colour PFM ("PF"): negative scale means little-endian; rows are stored
/// bottom-up. Grayscale "Pf" is rejected.
Array<float> decode_pfm(std::string_view bytes, const std::string& origin = "<memory>");
/// Little-endian, scale -1.
std::string encode_pfm(const Array<float>& pixels);
Array<float> read_pfm(const std::filesystem::path& path);
void write_pfm(const std::filesystem::path& path, const Array<float>& pixels);

}  // namespace ahdr
