// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <limits>

#include "ahdr/file_util.hpp"
#include "ahdr/image_io.hpp"
#include "test_util.hpp"

using namespace ahdr;
using ahdr::testutil::TempDir;

namespace {

const std::filesystem::path kFixtures = AHDR_FIXTURE_DIR;

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

Array<float> ramp_2x2() {
  Array<float> a(Shape{1, 3, 2, 2});
  for (std::size_t y = 0; y < 2; ++y)
    for (std::size_t x = 0; x < 2; ++x)
      for (std::size_t c = 0; c < 3; ++c) a.at(0, c, y, x) = static_cast<float>(4 * (2 * y + x) + c) / 16.0f;
  return a;
}

}  // namespace

TEST(Ppm, SingleRedPixel) {
  const std::string bytes = std::string("P6\n1 1\n255\n") + '\xff' + '\0' + '\0';
  const PpmImage img = decode_ppm(bytes);
  EXPECT_EQ(img.maxval, 255);
  EXPECT_EQ(img.pixels.shape(), (Shape{1, 3, 1, 1}));
  EXPECT_EQ(img.pixels[0], 1.0f);
  EXPECT_EQ(img.pixels[1], 0.0f);
  EXPECT_EQ(img.pixels[2], 0.0f);
  EXPECT_EQ(encode_ppm(img.pixels), bytes);
}

TEST(Ppm, SixteenBitMidGray) {
  std::string bytes = "P6\n1 1\n65535\n";
  for (int c = 0; c < 3; ++c) bytes += std::string("\x80\x00", 2);
  const PpmImage img = decode_ppm(bytes);
  EXPECT_EQ(img.maxval, 65535);
  EXPECT_EQ(img.pixels[0], static_cast<float>(32768.0 / 65535.0));
  EXPECT_NEAR(img.pixels[1], 0.50000763, 1e-8);
  EXPECT_EQ(encode_ppm(img.pixels, 16), bytes);
}

TEST(Ppm, HeaderCommentsAndRowOrder) {
  std::string bytes = "P6 # comment\n2 1\n255\n";
  const unsigned char px[6] = {0, 51, 102, 153, 204, 255};
  bytes.append(reinterpret_cast<const char*>(px), 6);
  const PpmImage img = decode_ppm(bytes);
  EXPECT_EQ(img.pixels.at(0, 0, 0, 0), 0.0f);
  EXPECT_EQ(img.pixels.at(0, 2, 0, 0), 0.4f);
  EXPECT_EQ(img.pixels.at(0, 0, 0, 1), 0.6f);
  EXPECT_EQ(img.pixels.at(0, 2, 0, 1), 1.0f);
}

TEST(Ppm, EncodingClampsAndRounds) {
  Array<float> a(Shape{1, 3, 1, 1});
  a[0] = -0.5f;
  a[1] = 2.0f;
  a[2] = 0.5f;
  const PpmImage back = decode_ppm(encode_ppm(a));
  EXPECT_EQ(back.pixels[0], 0.0f);
  EXPECT_EQ(back.pixels[1], 1.0f);
  EXPECT_EQ(back.pixels[2], 128.0f / 255.0f);
}

TEST(Ppm, MalformedInputsReportByteOffset) {
  EXPECT_NE(error_of([] { decode_ppm("P3\n1 1\n255\n"); }).find("at byte 0"), std::string::npos);
  EXPECT_NE(error_of([] { decode_ppm("P6\n1 x\n255\n"); }).find("at byte 5"), std::string::npos);
  EXPECT_NE(error_of([] { decode_ppm("P6\n1 1\n70000\n"); }).find("byte"), std::string::npos);
  const std::string truncated = error_of([] { decode_ppm(std::string("P6\n2 1\n255\n") + "abc"); });
  EXPECT_NE(truncated.find("truncated"), std::string::npos);
  EXPECT_NE(truncated.find("at byte 14"), std::string::npos);
  EXPECT_NE(error_of([] { decode_ppm("P6\n1 1\n255"); }).find("byte"), std::string::npos);
  EXPECT_NE(error_of([] { decode_ppm(""); }).find("byte"), std::string::npos);
  const std::string over = error_of([] { decode_ppm(std::string("P6\n1 1\n1000\n") + std::string("\x03\xff\0\0\0\0", 6)); });
  EXPECT_NE(over.find("exceeds maxval"), std::string::npos);
}

TEST(Ppm, ReadNamesPath) {
  TempDir d("ppm");
  const auto path = d / "bad.ppm";
  write_file_atomic(path, "P6\n");
  EXPECT_NE(error_of([&] { read_ppm(path); }).find("bad.ppm"), std::string::npos);
  EXPECT_NE(error_of([&] { read_ppm(d / "missing.ppm"); }).find("missing.ppm"), std::string::npos);
}

TEST(Ppm, RejectsNonRgb) {
  EXPECT_THROW(encode_ppm(Array<float>(Shape{1, 1, 2, 2})), DimensionError);
  EXPECT_THROW(encode_ppm(Array<float>(Shape{2, 3, 2, 2})), DimensionError);
  EXPECT_THROW(encode_ppm(Array<float>(Shape{1, 3, 2, 2}), 12), ConfigError);
}

TEST(Ppm, RoundTripOddSizesBothDepths) {
  for (int bits : {8, 16}) {
    const double levels = bits == 8 ? 255.0 : 65535.0;
    Rng rng(static_cast<std::uint64_t>(bits));
    Array<float> a(Shape{1, 3, 7, 5});
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = static_cast<float>(static_cast<double>(rng.index(static_cast<std::uint64_t>(levels) + 1)) / levels);
    }
    a[0] = 0.0f;
    a[1] = 1.0f;
    TempDir d("ppm_rt");
    write_ppm(d / "x.ppm", a, bits);
    const PpmImage back = read_ppm(d / "x.ppm");
    EXPECT_EQ(back.pixels, a);
    EXPECT_EQ(back.maxval, bits == 8 ? 255 : 65535);
    EXPECT_EQ(encode_ppm(back.pixels, bits), read_file(d / "x.ppm"));
  }
}

TEST(Pfm, GoldenFixtureLittleEndian) {
  const Array<float> a = read_pfm(kFixtures / "ramp_2x2_le.pfm");
  EXPECT_EQ(a, ramp_2x2());
  EXPECT_EQ(encode_pfm(ramp_2x2()), read_file(kFixtures / "ramp_2x2_le.pfm"));
}

TEST(Pfm, GoldenFixtureBigEndian) {
  EXPECT_EQ(read_pfm(kFixtures / "ramp_2x2_be.pfm"), ramp_2x2());
}

TEST(Pfm, BottomUpRowOrder) {
  Array<float> a(Shape{1, 3, 2, 1});
  a.at(0, 0, 0, 0) = 1.0f;  // top row
  a.at(0, 0, 1, 0) = 2.0f;
  const std::string bytes = encode_pfm(a);
  float first;
  std::memcpy(&first, bytes.data() + bytes.size() - 24, 4);
  EXPECT_EQ(first, 2.0f);
}

TEST(Pfm, RejectsGrayscaleAndNaN) {
  const std::string gray = error_of([] { decode_pfm(std::string("Pf\n1 1\n-1.0\n") + std::string(4, '\0')); });
  EXPECT_NE(gray.find("Pf"), std::string::npos);
  Array<float> a(Shape{1, 3, 2, 3});
  a.at(0, 1, 1, 2) = std::numeric_limits<float>::quiet_NaN();
  const std::string nan = error_of([&] { decode_pfm(encode_pfm(a)); });
  EXPECT_NE(nan.find("pixel index 5"), std::string::npos);
}

TEST(Pfm, MalformedHeaderAndTruncation) {
  EXPECT_NE(error_of([] { decode_pfm("PF\n1 1\n0\n"); }).find("scale"), std::string::npos);
  EXPECT_NE(error_of([] { decode_pfm("PF\n-1 1\n-1\n"); }).find("at byte 3"), std::string::npos);
  EXPECT_NE(error_of([] { decode_pfm("PF\n1 1\n-1\nabc"); }).find("truncated"), std::string::npos);
  EXPECT_NE(error_of([] { decode_pfm("P6\n1 1\n-1\n"); }).find("at byte 0"), std::string::npos);
}

TEST(Pfm, RoundTripExtremesAndOddSizes) {
  Array<float> a = testutil::random_array<float>({1, 3, 3, 5}, 2, -10.0, 10.0);
  a[0] = 0.0f;
  a[1] = 1.0f;
  a[2] = -0.0f;
  a[3] = std::numeric_limits<float>::infinity();
  a[4] = std::numeric_limits<float>::denorm_min();
  a[5] = std::numeric_limits<float>::max();
  TempDir d("pfm_rt");
  write_pfm(d / "x.pfm", a);
  const Array<float> back = read_pfm(d / "x.pfm");
  EXPECT_EQ(std::memcmp(back.data(), a.data(), a.size() * sizeof(float)), 0);
}
