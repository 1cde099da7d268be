// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <set>

#include "ahdr/hdr_domain.hpp"
#include "ahdr/init.hpp"
#include "ahdr/network.hpp"
#include "test_util.hpp"

using namespace ahdr;
using ahdr::testutil::random_array;

namespace {

using TF = Tensor<float>;

NetConfig small(Variant v = Variant::kAhdr, std::size_t c = 8) {
  NetConfig s;
  s.base_channels = c;
  s.growth_rate = 4;
  s.num_drdb = 2;
  return NetConfig::for_variant(v, s);
}

void zero_all(const NetworkParams<float>& p) {
  for (const auto& n : p.named()) {
    TF t = n.tensor;
    t.mutable_value().fill(0.0f);
  }
}

std::array<TF, 3> inputs(std::size_t h, std::size_t w, std::uint64_t seed) {
  std::array<TF, 3> x;
  const int biases[3] = {-2, 0, 2};
  for (int f = 0; f < 3; ++f) {
    x[f] = TF(build_input(random_array<float>({1, 3, h, w}, seed + f, 0.0, 1.0), std::ldexp(1.0, biases[f])));
  }
  return x;
}

// Parameter count of one dense block enumerated from the layer shapes.
std::size_t drdb_oracle(std::size_t c, std::size_t g, std::size_t layers) {
  std::size_t total = 0;
  for (std::size_t j = 0; j + 1 < layers; ++j) total += (c + j * g) * g * 9 + g;
  total += (c + (layers - 1) * g) * c + c;
  return total;
}

}  // namespace

TEST(Encode, SharedWeightsAndZeroInput) {
  const NetConfig cfg = small();
  const auto p = build_variant<float>(cfg, 1);
  Tape<float> tape(false);
  const TF x(random_array<float>({1, 6, 5, 5}, 2, 0.0, 1.0));
  EXPECT_EQ(encode(tape, x, p).value(), encode(tape, TF(x.value()), p).value());
  const TF z = encode(tape, TF(Array<float>(Shape{1, 6, 5, 5})), p);
  for (float v : z.value().span()) EXPECT_EQ(v, 0.0f);
  EXPECT_EQ(z.shape().c, cfg.base_channels);
}

TEST(Encode, DefaultWidthIs64Channels) {
  const auto p = allocate_params<float>(NetConfig{});
  Tape<float> tape(false);
  EXPECT_EQ(encode(tape, TF(Array<float>(Shape{1, 6, 3, 3})), p).shape().c, 64u);
  EXPECT_THROW(encode(tape, TF(Array<float>(Shape{1, 5, 3, 3})), p), DimensionError);
}

TEST(Attention, ZeroWeightsGiveHalf) {
  const auto p = allocate_params<float>(small());
  Tape<float> tape(false);
  const TF z(random_array<float>({1, 8, 4, 4}, 3));
  const TF a = attention_forward(tape, z, z, *p.attention_low);
  EXPECT_EQ(a.shape(), z.shape());
  for (float v : a.value().span()) EXPECT_EQ(v, 0.5f);
}

TEST(Attention, StrictlyInsideUnitInterval) {
  const auto p = build_variant<float>(small(Variant::kAhdr, 64), 4);
  Tape<float> tape(false);
  const TF zi(random_array<float>({1, 64, 6, 6}, 5, 0.0, 3.0)), zr(random_array<float>({1, 64, 6, 6}, 6, 0.0, 3.0));
  const TF a = attention_forward(tape, zi, zr, *p.attention_high);
  EXPECT_EQ(a.shape(), zi.shape());
  for (float v : a.value().span()) {
    EXPECT_GT(v, 0.0f);
    EXPECT_LT(v, 1.0f);
  }
  EXPECT_THROW(attention_forward(tape, zi, TF(Array<float>(Shape{1, 64, 6, 5})), *p.attention_high),
               DimensionError);
}

TEST(Attend, MasksExactly) {
  Tape<float> tape(false);
  const auto zv = random_array<float>({1, 2, 4, 4}, 7);
  const TF z(zv);
  EXPECT_EQ(attend(tape, z, TF(Array<float>(zv.shape(), 1.0f))).value(), zv);
  const Array<float> masked = attend(tape, z, TF(Array<float>(zv.shape(), 0.0f))).value();
  for (float v : masked.span()) EXPECT_EQ(v, 0.0f);
  Array<float> half(zv.shape());
  for (std::size_t i = 0; i < half.size(); i += 2) half[i] = 1.0f;
  const auto out = attend(tape, z, TF(half)).value();
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], i % 2 == 0 ? zv[i] : 0.0f);
}

TEST(StackFeatures, OrderAndWidth) {
  Tape<float> tape(false);
  const TF a(random_array<float>({1, 64, 3, 3}, 1)), b(random_array<float>({1, 64, 3, 3}, 2)),
      c(random_array<float>({1, 64, 3, 3}, 3));
  const TF s = stack_features(tape, a, b, c);
  EXPECT_EQ(s.shape().c, 192u);
  EXPECT_EQ(channel_slice(s.value(), 0, 64), a.value());
  EXPECT_EQ(channel_slice(s.value(), 64, 128), b.value());
  EXPECT_EQ(channel_slice(s.value(), 128, 192), c.value());
  EXPECT_NE(stack_features(tape, c, b, a).value(), s.value());
}

TEST(Drdb, ZeroWeightsAreIdentity) {
  const NetConfig cfg = small();
  const auto p = allocate_params<float>(cfg);
  Tape<float> tape(false);
  const TF x(random_array<float>({1, 8, 7, 5}, 8));
  EXPECT_EQ(drdb_forward(tape, x, p.drdbs[0], cfg).value(), x.value());
}

TEST(Drdb, PreservesShapeAndChecksChannels) {
  const NetConfig cfg = NetConfig::for_variant(Variant::kAhdr);
  const auto p = build_variant<float>(cfg, 9);
  Tape<float> tape(false);
  const TF x(random_array<float>({1, 64, 5, 6}, 10));
  EXPECT_EQ(drdb_forward(tape, x, p.drdbs[0], cfg).shape(), x.shape());
  EXPECT_THROW(drdb_forward(tape, TF(Array<float>(Shape{1, 32, 5, 6})), p.drdbs[0], cfg), DimensionError);
}

TEST(Drdb, LayerWidthsForDefaultConfig) {
  const auto p = allocate_params<float>(NetConfig{});
  const auto& d = p.drdbs[0];
  ASSERT_EQ(d.dense.size(), 5u);
  const std::size_t expected_in[] = {64, 96, 128, 160, 192};
  for (std::size_t j = 0; j < 5; ++j) {
    EXPECT_EQ(d.dense[j].spec.in_channels, expected_in[j]);
    EXPECT_EQ(d.dense[j].spec.out_channels, 32u);
    EXPECT_EQ(d.dense[j].spec.kernel_size, 3u);
    EXPECT_EQ(d.dense[j].spec.dilation, 2u);
  }
  EXPECT_EQ(d.compress.spec.in_channels, 224u);
  EXPECT_EQ(d.compress.spec.out_channels, 64u);
  EXPECT_EQ(d.compress.spec.kernel_size, 1u);
}

TEST(Drdb, ParameterCountMatchesEnumeration) {
  const auto p = allocate_params<float>(NetConfig{});
  EXPECT_EQ(drdb_parameter_count(p.drdbs[0]), drdb_oracle(64, 32, 6));
  EXPECT_EQ(drdb_parameter_count(p.drdbs[0]), 198880u);
  const auto q = allocate_params<float>(small());
  EXPECT_EQ(drdb_parameter_count(q.drdbs[0]), drdb_oracle(8, 4, 6));
}

TEST(Merge, ZeroWeightsWithGlobalResidualGiveHalf) {
  const NetConfig cfg = small();
  const auto p = allocate_params<float>(cfg);
  Tape<float> tape(false);
  const TF zs(random_array<float>({1, 24, 5, 5}, 11)), zr(random_array<float>({1, 8, 5, 5}, 12, 0.0, 1.0));
  const TF h = merge_forward(tape, zs, zr, p, cfg);
  EXPECT_EQ(h.shape(), (Shape{1, 3, 5, 5}));
  for (float v : h.value().span()) EXPECT_EQ(v, 0.5f);
}

TEST(Merge, GlobalResidualChangesOutput) {
  const NetConfig with = small();
  NetConfig without = NetConfig::for_variant(Variant::kNoGrl, with);
  const auto p = build_variant<float>(with, 13);
  Tape<float> tape(false);
  const TF zs(random_array<float>({1, 24, 6, 6}, 14, 0.0, 1.0)), zr(random_array<float>({1, 8, 6, 6}, 15, 0.5, 1.5));
  EXPECT_NE(merge_forward(tape, zs, zr, p, with).value(), merge_forward(tape, zs, zr, p, without).value());
}

TEST(Forward, OutputRangeDeterminismAndBranchOrder) {
  const NetConfig cfg = small();
  const auto p = build_variant<float>(cfg, 16);
  // Non-zero biases so the two attention modules differ in more than weights.
  const auto x = inputs(9, 11, 20);
  Tape<float> t1(false), t2(false);
  const auto a = ahdr_forward(t1, x[0], x[1], x[2], p, cfg);
  const auto b = ahdr_forward(t2, x[0], x[1], x[2], p, cfg);
  EXPECT_EQ(a.hdr.value(), b.hdr.value());
  EXPECT_EQ(a.hdr.shape(), (Shape{1, 3, 9, 11}));
  for (float v : a.hdr.value().span()) {
    EXPECT_GT(v, 0.0f);
    EXPECT_LT(v, 1.0f);
  }
  Tape<float> t3(false);
  EXPECT_NE(ahdr_forward(t3, x[2], x[1], x[0], p, cfg).hdr.value(), a.hdr.value());
}

TEST(Forward, OddSizesPreserved) {
  for (Variant v : {Variant::kAhdr, Variant::kRb, Variant::kARdb}) {
    const NetConfig cfg = small(v);
    const auto p = build_variant<float>(cfg, 17);
    for (auto [h, w] : {std::pair<std::size_t, std::size_t>{8, 8}, {17, 17}, {5, 13}, {1, 1}}) {
      const auto x = inputs(h, w, 30);
      Tape<float> tape(false);
      EXPECT_EQ(ahdr_forward(tape, x[0], x[1], x[2], p, cfg).hdr.shape(), (Shape{1, 3, h, w}));
    }
  }
}

TEST(Forward, BatchEntriesIndependent) {
  const NetConfig cfg = small();
  const auto p = build_variant<float>(cfg, 18);
  const auto x0 = inputs(6, 6, 40), x1 = inputs(6, 6, 50);
  std::array<TF, 3> stacked;
  for (int f = 0; f < 3; ++f) {
    const std::vector<Array<float>> parts{x0[f].value(), x1[f].value()};
    stacked[f] = TF(batch_stack<float>(parts));
  }
  Tape<float> tape(false);
  const auto both = ahdr_forward(tape, stacked[0], stacked[1], stacked[2], p, cfg).hdr.value();
  const auto one = ahdr_forward(tape, x1[0], x1[1], x1[2], p, cfg).hdr.value();
  const auto item = batch_item(both, 1);
  for (std::size_t i = 0; i < one.size(); ++i) EXPECT_NEAR(item[i], one[i], 1e-6f);
}

TEST(Forward, ZeroAttentionRemovesBranchDependence) {
  const NetConfig cfg = small();
  const auto p = build_variant<float>(cfg, 19);
  Tape<float> tape;
  const TF z1(random_array<float>({1, 8, 5, 5}, 60, 0.0, 1.0), true);
  const TF z2(random_array<float>({1, 8, 5, 5}, 61, 0.0, 1.0), true);
  const TF z3(random_array<float>({1, 8, 5, 5}, 62, 0.0, 1.0), true);
  const TF zeros(Array<float>(z1.shape()));
  const TF z1p = attend(tape, z1, zeros);
  const TF z3p = attend(tape, z3, attention_forward(tape, z3, z2, *p.attention_high));
  const TF h = merge_forward(tape, stack_features(tape, z1p, z2, z3p), z2, p, cfg);
  tape.backward(sum(tape, h));
  ASSERT_TRUE(z1.has_grad());
  for (float g : z1.grad().span()) EXPECT_EQ(g, 0.0f);
  bool any = false;
  for (float g : z3.grad().span()) any = any || g != 0.0f;
  EXPECT_TRUE(any);
}

TEST(BuildVariant, StructureFollowsFlags) {
  const auto ahdr = build_variant<float>(small(Variant::kAhdr), 1);
  EXPECT_TRUE(ahdr.attention_low && ahdr.attention_high);
  const auto drdb = build_variant<float>(small(Variant::kDrdb), 1);
  EXPECT_FALSE(drdb.attention_low || drdb.attention_high);
  const auto rdb = build_variant<float>(small(Variant::kRdb), 1);
  for (const auto& layer : rdb.drdbs[0].dense) EXPECT_EQ(layer.spec.dilation, 1u);
  const auto rb = build_variant<float>(small(Variant::kRb), 1);
  EXPECT_TRUE(rb.drdbs.empty());
  EXPECT_EQ(rb.res_blocks.size(), 2u);
  const auto deep = build_variant<float>(small(Variant::kDeepRb), 1);
  EXPECT_EQ(deep.res_blocks.size(), 4u);
  EXPECT_EQ(deep.fuse.spec.in_channels, 4u * 8u);
}

TEST(BuildVariant, SameSeedBitIdentical) {
  const NetConfig cfg = small();
  const auto a = build_variant<float>(cfg, 77), b = build_variant<float>(cfg, 77), c = build_variant<float>(cfg, 78);
  const auto na = a.named(), nb = b.named(), nc = c.named();
  ASSERT_EQ(na.size(), nb.size());
  bool differs = false;
  for (std::size_t i = 0; i < na.size(); ++i) {
    EXPECT_EQ(na[i].name, nb[i].name);
    EXPECT_EQ(na[i].tensor.value(), nb[i].tensor.value());
    differs = differs || na[i].tensor.value() != nc[i].tensor.value();
  }
  EXPECT_TRUE(differs);
}

TEST(BuildVariant, BiasesZeroWeightsBounded) {
  const auto p = build_variant<float>(small(), 5);
  for (const auto& n : p.named()) {
    if (n.name.ends_with(".bias")) {
      for (float v : n.tensor.value().span()) EXPECT_EQ(v, 0.0f);
    } else {
      const float bound = static_cast<float>(xavier_bound(n.tensor.shape()));
      for (float v : n.tensor.value().span()) EXPECT_LE(std::abs(v), bound);
    }
  }
}

TEST(BuildVariant, NamesUniqueAndCounted) {
  const auto p = build_variant<float>(small(), 5);
  std::set<std::string> names;
  std::size_t total = 0;
  for (const auto& n : p.named()) {
    EXPECT_TRUE(names.insert(n.name).second) << n.name;
    total += n.tensor.value().size();
  }
  EXPECT_EQ(total, p.parameter_count());
  EXPECT_TRUE(names.count("encoder.weight"));
  EXPECT_TRUE(names.count("attention_low.conv1.weight"));
  EXPECT_TRUE(names.count("drdb1.compress.bias"));
  EXPECT_TRUE(names.count("tail2.weight"));
}

TEST(NetConfig, ValidationAndParsing) {
  NetConfig c;
  c.base_channels = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = NetConfig{};
  c.num_drdb = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = NetConfig{};
  c.drdb_conv_layers = 1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = NetConfig{};
  c.dilation = 1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = NetConfig{};
  c.rb_depth_multiplier = 2;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(build_variant<float>(c, 1), ConfigError);
  for (std::string_view name : {"ahdr", "drdb", "a-rdb", "rdb", "rb", "deep-rb", "no-grl"}) {
    EXPECT_EQ(variant_name(parse_variant(name)), name);
  }
  EXPECT_THROW(parse_variant("unet"), ConfigError);
}

TEST(ConvertParams, DoubleRoundTrip) {
  const NetConfig cfg = small();
  const auto p = build_variant<float>(cfg, 3);
  const auto back = convert_params<float>(convert_params<double>(p, cfg), cfg);
  const auto a = p.named(), b = back.named();
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].tensor.value(), b[i].tensor.value());
}
