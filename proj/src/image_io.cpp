// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#include "ahdr/image_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>

#include "ahdr/file_util.hpp"

namespace ahdr {
namespace {

// Minimal netpbm-style header tokenizer that tracks the byte offset.
class HeaderReader {
 public:
  HeaderReader(std::string_view bytes, std::string origin) : bytes_(bytes), origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw DataError(origin_ + ": " + what + " at byte " + std::to_string(pos_));
  }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view token() {
    skip_space_and_comments();
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
    if (start == pos_) fail("malformed header: unexpected end of data");
    return bytes_.substr(start, pos_ - start);
  }

  long integer(const char* what) {
    skip_space_and_comments();
    const std::size_t at = pos_;
    const std::string_view t = token();
    long v = 0;
    const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || end != t.data() + t.size() || v <= 0) {
      pos_ = at;
      fail(std::string("malformed header: bad ") + what + " '" + std::string(t) + "'");
    }
    return v;
  }

  double real(const char* what) {
    skip_space_and_comments();
    const std::size_t at = pos_;
    const std::string_view t = token();
    double v = 0;
    const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || end != t.data() + t.size()) {
      pos_ = at;
      fail(std::string("malformed header: bad ") + what + " '" + std::string(t) + "'");
    }
    return v;
  }

  // Exactly one whitespace byte separates the header from the payload.
  void end_of_header() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      fail("malformed header: missing separator before payload");
    }
    ++pos_;
  }

  std::size_t pos() const { return pos_; }

 private:
  std::string_view bytes_;
  std::string origin_;
  std::size_t pos_ = 0;
};

void require_rgb(const Array<float>& pixels, const char* codec) {
  const Shape& s = pixels.shape();
  if (s.n != 1 || s.c != 3) {
    throw DimensionError(s.n != 1 ? "batch" : "channels",
                         std::string(codec) + ": expected a (1, 3, H, W) image, got " + s.str());
  }
  if (s.h == 0 || s.w == 0) throw DimensionError("height", std::string(codec) + ": empty image");
}

}  // namespace

PpmImage decode_ppm(std::string_view bytes, const std::string& origin) {
  HeaderReader r(bytes, origin);
  if (r.token() != "P6") {
    throw DataError(origin + ": malformed header: expected P6 magic at byte 0");
  }
  const long width = r.integer("width");
  const long height = r.integer("height");
  const long maxval = r.integer("maxval");
  if (maxval > 65535) r.fail("malformed header: maxval " + std::to_string(maxval) + " exceeds 65535");
  r.end_of_header();
  const std::size_t sample_bytes = maxval < 256 ? 1 : 2;
  const std::size_t w = static_cast<std::size_t>(width);
  const std::size_t h = static_cast<std::size_t>(height);
  const std::size_t needed = w * h * 3 * sample_bytes;
  const std::size_t offset = r.pos();
  if (bytes.size() - offset < needed) {
    throw DataError(origin + ": truncated payload at byte " + std::to_string(bytes.size()) + " (expected " +
                    std::to_string(offset + needed) + " bytes)");
  }
  PpmImage img;
  img.maxval = static_cast<int>(maxval);
  img.pixels = Array<float>(Shape{1, 3, h, w});
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + offset);
  const float scale = static_cast<float>(maxval);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      for (std::size_t c = 0; c < 3; ++c) {
        unsigned v = p[0];
        if (sample_bytes == 2) v = (v << 8) | p[1];
        p += sample_bytes;
        if (v > static_cast<unsigned>(maxval)) {
          throw DataError(origin + ": sample exceeds maxval at byte " +
                          std::to_string(offset + static_cast<std::size_t>(
                                                      p - reinterpret_cast<const unsigned char*>(bytes.data() + offset)) -
                                         sample_bytes));
        }
        img.pixels.at(0, c, y, x) = static_cast<float>(v) / scale;
      }
    }
  }
  return img;
}

std::string encode_ppm(const Array<float>& pixels, int bits) {
  require_rgb(pixels, "ppm");
  if (bits != 8 && bits != 16) throw ConfigError("ppm: bit depth must be 8 or 16");
  const Shape& s = pixels.shape();
  const unsigned maxval = bits == 8 ? 255u : 65535u;
  std::string out = "P6\n" + std::to_string(s.w) + " " + std::to_string(s.h) + "\n" + std::to_string(maxval) + "\n";
  const std::size_t header = out.size();
  out.resize(header + s.h * s.w * 3 * static_cast<std::size_t>(bits / 8));
  auto* p = reinterpret_cast<unsigned char*>(out.data() + header);
  for (std::size_t y = 0; y < s.h; ++y) {
    for (std::size_t x = 0; x < s.w; ++x) {
      for (std::size_t c = 0; c < 3; ++c) {
        const float v = pixels.at(0, c, y, x);
        const float clamped = std::isnan(v) ? 0.0f : std::clamp(v, 0.0f, 1.0f);
        const auto q = static_cast<unsigned>(std::lround(static_cast<double>(clamped) * maxval));
        if (bits == 16) *p++ = static_cast<unsigned char>(q >> 8);
        *p++ = static_cast<unsigned char>(q & 0xff);
      }
    }
  }
  return out;
}

PpmImage read_ppm(const std::filesystem::path& path) { return decode_ppm(read_file(path), path.string()); }

void write_ppm(const std::filesystem::path& path, const Array<float>& pixels, int bits) {
  write_file_atomic(path, encode_ppm(pixels, bits));
}

Array<float> decode_pfm(std::string_view bytes, const std::string& origin) {
  HeaderReader r(bytes, origin);
  const std::string_view magic = r.token();
  if (magic == "Pf") throw DataError(origin + ": grayscale PFM (Pf) is not supported at byte 0");
  if (magic != "PF") throw DataError(origin + ": malformed header: expected PF magic at byte 0");
  const long width = r.integer("width");
  const long height = r.integer("height");
  const double scale = r.real("scale");
  if (scale == 0.0 || !std::isfinite(scale)) r.fail("malformed header: scale must be finite and non-zero");
  r.end_of_header();
  const bool little = scale < 0.0;
  const std::size_t w = static_cast<std::size_t>(width);
  const std::size_t h = static_cast<std::size_t>(height);
  const std::size_t needed = w * h * 3 * sizeof(float);
  const std::size_t offset = r.pos();
  if (bytes.size() - offset < needed) {
    throw DataError(origin + ": truncated payload at byte " + std::to_string(bytes.size()) + " (expected " +
                    std::to_string(offset + needed) + " bytes)");
  }
  Array<float> out(Shape{1, 3, h, w});
  const char* p = bytes.data() + offset;
  const bool swap = little != (std::endian::native == std::endian::little);
  for (std::size_t row = 0; row < h; ++row) {
    const std::size_t y = h - 1 - row;  // bottom-up storage
    for (std::size_t x = 0; x < w; ++x) {
      for (std::size_t c = 0; c < 3; ++c) {
        std::uint32_t bitsv;
        std::memcpy(&bitsv, p, 4);
        p += 4;
        if (swap) bitsv = __builtin_bswap32(bitsv);
        const float v = std::bit_cast<float>(bitsv);
        if (std::isnan(v)) {
          throw DataError(origin + ": NaN at pixel index " + std::to_string(y * w + x) + " (x=" + std::to_string(x) +
                          ", y=" + std::to_string(y) + ", channel " + std::to_string(c) + ")");
        }
        out.at(0, c, y, x) = v;
      }
    }
  }
  return out;
}

std::string encode_pfm(const Array<float>& pixels) {
  require_rgb(pixels, "pfm");
  const Shape& s = pixels.shape();
  std::string out = "PF\n" + std::to_string(s.w) + " " + std::to_string(s.h) + "\n-1.0\n";
  const std::size_t header = out.size();
  out.resize(header + s.h * s.w * 3 * sizeof(float));
  char* p = out.data() + header;
  for (std::size_t row = 0; row < s.h; ++row) {
    const std::size_t y = s.h - 1 - row;
    for (std::size_t x = 0; x < s.w; ++x) {
      for (std::size_t c = 0; c < 3; ++c) {
        std::uint32_t bitsv = std::bit_cast<std::uint32_t>(pixels.at(0, c, y, x));
        if constexpr (std::endian::native == std::endian::big) bitsv = __builtin_bswap32(bitsv);
        std::memcpy(p, &bitsv, 4);
        p += 4;
      }
    }
  }
  return out;
}

Array<float> read_pfm(const std::filesystem::path& path) { return decode_pfm(read_file(path), path.string()); }

void write_pfm(const std::filesystem::path& path, const Array<float>& pixels) {
  write_file_atomic(path, encode_pfm(pixels));
}

}  // namespace ahdr
