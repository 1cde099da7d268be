// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "ahdr/array.hpp"
#include "test_util.hpp"

using namespace ahdr;

TEST(Array, SizeMatchesShape) {
  const Array<float> a(Shape{2, 3, 4, 5});
  EXPECT_EQ(a.size(), 120u);
  EXPECT_EQ(a.shape().plane(), 20u);
  EXPECT_THROW(Array<float>(Shape{1, 1, 2, 2}, std::vector<float>(3)), DimensionError);
}

TEST(Array, RowMajorNchwIndexing) {
  Array<int> a(Shape{2, 3, 4, 5});
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = static_cast<int>(i);
  EXPECT_EQ(a.at(1, 2, 3, 4), 119);
  EXPECT_EQ(a.at(0, 1, 0, 0), 20);
  EXPECT_EQ(a.at(1, 0, 0, 0), 60);
  EXPECT_EQ(a.plane(1, 1)[6], a.at(1, 1, 1, 1));
}

TEST(Array, RequireSameShapeNamesAxis) {
  try {
    require_same_shape(Shape{1, 3, 8, 8}, Shape{1, 4, 8, 8}, "op");
    FAIL();
  } catch (const DimensionError& e) {
    EXPECT_EQ(e.axis(), "channels");
  }
  try {
    require_same_shape(Shape{1, 3, 8, 8}, Shape{1, 3, 8, 9}, "op");
    FAIL();
  } catch (const DimensionError& e) {
    EXPECT_EQ(e.axis(), "width");
  }
  EXPECT_NO_THROW(require_same_shape(Shape{1, 3, 8, 8}, Shape{1, 3, 8, 8}, "op"));
}

TEST(Array, ChannelSliceInvertsConcat) {
  const auto a = testutil::random_array<float>({2, 2, 3, 3}, 1);
  const auto b = testutil::random_array<float>({2, 5, 3, 3}, 2);
  const std::vector<Array<float>> parts{a, b};
  const Array<float> c = channel_concat<float>(parts);
  EXPECT_EQ(c.shape(), (Shape{2, 7, 3, 3}));
  EXPECT_EQ(channel_slice(c, 0, 2), a);
  EXPECT_EQ(channel_slice(c, 2, 7), b);
}

TEST(Array, BatchStackAndItem) {
  const auto a = testutil::random_array<double>({1, 2, 3, 4}, 3);
  const auto b = testutil::random_array<double>({1, 2, 3, 4}, 4);
  const std::vector<Array<double>> parts{a, b};
  const Array<double> s = batch_stack<double>(parts);
  EXPECT_EQ(s.shape(), (Shape{2, 2, 3, 4}));
  EXPECT_EQ(batch_item(s, 0), a);
  EXPECT_EQ(batch_item(s, 1), b);
  const std::vector<Array<double>> bad{a, testutil::random_array<double>({1, 2, 3, 5}, 5)};
  EXPECT_THROW(batch_stack<double>(bad), DimensionError);
}

TEST(Array, AllFinite) {
  Array<float> a(Shape{1, 1, 2, 2}, 1.0f);
  EXPECT_TRUE(all_finite(a));
  a[3] = std::numeric_limits<float>::quiet_NaN();
  EXPECT_FALSE(all_finite(a));
  a[3] = std::numeric_limits<float>::infinity();
  EXPECT_FALSE(all_finite(a));
}

TEST(Array, CastRoundTrip) {
  const auto a = testutil::random_array<float>({1, 3, 5, 7}, 9);
  EXPECT_EQ(cast<float>(cast<double>(a)), a);
}
