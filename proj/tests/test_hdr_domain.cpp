// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "ahdr/gradcheck.hpp"
#include "ahdr/hdr_domain.hpp"
#include "test_util.hpp"

using namespace ahdr;
using ahdr::testutil::random_array;

namespace {

Array<double> scalar(double v) { return Array<double>(Shape{1, 1, 1, 1}, v); }

}  // namespace

TEST(LdrToHdr, FixedPointsAndZero) {
  EXPECT_EQ(ldr_to_hdr_domain(scalar(1.0), 1.0)[0], 1.0);
  EXPECT_EQ(ldr_to_hdr_domain(scalar(0.0), 0.25)[0], 0.0);
  EXPECT_EQ(ldr_to_hdr_domain(scalar(0.0), 4.0)[0], 0.0);
}

TEST(LdrToHdr, HalfAtFourStops) {
  const long double oracle = std::pow(0.5L, 2.2L) / 4.0L;
  const double got = ldr_to_hdr_domain(scalar(0.5), 4.0, GammaParams{2.2})[0];
  EXPECT_NEAR(got, static_cast<double>(oracle), 1e-12);
  EXPECT_NEAR(got, 0.05441, 1e-5);
}

TEST(LdrToHdr, RejectsNonPositiveExposure) {
  EXPECT_THROW(ldr_to_hdr_domain(scalar(0.5), 0.0), ConfigError);
  EXPECT_THROW(ldr_to_hdr_domain(scalar(0.5), -1.0), ConfigError);
  EXPECT_THROW(GammaParams{1.0}.validate(), ConfigError);
}

TEST(LdrToHdr, ShortExposureExceedsOne) {
  EXPECT_GT(ldr_to_hdr_domain(scalar(0.9), 0.25)[0], 1.0);
}

TEST(LdrToHdr, MonotoneInIntensity) {
  double prev = -1.0;
  for (int i = 0; i <= 255; ++i) {
    const double h = ldr_to_hdr_domain(scalar(i / 255.0), 0.25)[0];
    EXPECT_GT(h, prev);
    prev = h;
  }
}

TEST(LdrToHdr, RoundTripThroughCameraCurve) {
  for (double t : {0.25, 1.0, 4.0, 8.0}) {
    for (int i = 1; i <= 100; ++i) {
      const double v = i / 100.0;
      const double h = ldr_to_hdr_domain(scalar(v), t)[0];
      EXPECT_NEAR(std::pow(h * t, 1.0 / 2.2), v, 1e-6);
    }
  }
}

TEST(LdrToHdr, ExposureImageFromBias) {
  const auto e = ExposureImage::from_bias(Array<float>(Shape{1, 3, 2, 2}, 0.5f), -2);
  EXPECT_EQ(e.exposure_time, 0.25);
  EXPECT_EQ(ExposureImage::from_bias(Array<float>(Shape{1, 3, 1, 1}), 3).exposure_time, 8.0);
}

TEST(BuildInput, ChannelLayout) {
  const auto ldr = random_array<float>({1, 3, 4, 5}, 1, 0.0, 1.0);
  const auto img = ExposureImage::from_bias(ldr, 2);
  const Array<float> x = build_input(img);
  ASSERT_EQ(x.shape(), (Shape{1, 6, 4, 5}));
  EXPECT_EQ(channel_slice(x, 0, 3), ldr);
  EXPECT_EQ(channel_slice(x, 3, 6), ldr_to_hdr_domain(img));
}

TEST(BuildInput, ReferenceChannelsAreGammaPowers) {
  const auto ldr = random_array<double>({1, 3, 3, 3}, 2, 0.0, 1.0);
  const Array<double> x = build_input(ldr, 1.0);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t p = 0; p < 9; ++p) EXPECT_NEAR(x.plane(0, c + 3)[p], std::pow(x.plane(0, c)[p], 2.2), 1e-15);
}

TEST(BuildInput, RejectsWrongChannelCount) {
  EXPECT_THROW(build_input(Array<float>(Shape{1, 4, 2, 2}), 1.0), DimensionError);
}

TEST(Tonemap, ExactValues) {
  EXPECT_EQ(mu_law_tonemap(scalar(0.0))[0], 0.0);
  EXPECT_EQ(mu_law_tonemap(scalar(1.0))[0], 1.0);
  const long double oracle = std::log(2501.0L) / std::log(5001.0L);
  const double got = mu_law_tonemap(scalar(0.5), TonemapParams{5000.0})[0];
  EXPECT_NEAR(got, static_cast<double>(oracle), 1e-14);
  EXPECT_NEAR(got, 0.91864, 1e-4);
}

TEST(Tonemap, StrictlyMonotone) {
  double prev = -1.0;
  for (int i = 0; i <= 10000; ++i) {
    const double v = mu_law_tonemap(scalar(i / 10000.0))[0];
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(Tonemap, RejectsNonPositiveMu) {
  EXPECT_THROW(mu_law_tonemap(scalar(0.5), TonemapParams{0.0}), ConfigError);
  EXPECT_THROW(mu_law_tonemap(scalar(0.5), TonemapParams{-1.0}), ConfigError);
}

TEST(Tonemap, TapedFormMatchesArrayForm) {
  const auto h = random_array<double>({1, 3, 4, 4}, 3, 0.0, 1.0);
  Tape<double> tape(false);
  EXPECT_EQ(mu_law_tonemap(tape, Tensor<double>(h)).value(), mu_law_tonemap(h));
}

TEST(Tonemap, GradientMatchesFiniteDifferences) {
  const auto h = random_array<double>({1, 3, 4, 4}, 4, 0.01, 0.99);
  const double err = finite_diff_check<double>(
      [](Tape<double>& t, const Tensor<double>& x) { return sum(t, mu_law_tonemap(t, x)); }, h, 1e-7);
  EXPECT_LT(err, 1e-6);
}

TEST(Clamp, Values) {
  Array<float> a(Shape{1, 1, 1, 4}, std::vector<float>{-0.5f, 0.25f, 1.0f, 3.0f});
  const auto c = clamp_values(a);
  EXPECT_EQ(c[0], 0.0f);
  EXPECT_EQ(c[1], 0.25f);
  EXPECT_EQ(c[2], 1.0f);
  EXPECT_EQ(c[3], 1.0f);
}
