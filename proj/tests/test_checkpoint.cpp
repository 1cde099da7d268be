// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cstring>
#include <set>

#include "ahdr/checkpoint.hpp"
#include "ahdr/file_util.hpp"
#include "test_util.hpp"

using namespace ahdr;
using ahdr::testutil::TempDir;

namespace {

NetConfig small(Variant v, std::size_t blocks = 1) {
  NetConfig sizes;
  sizes.base_channels = 4;
  sizes.growth_rate = 2;
  sizes.num_drdb = blocks;
  return NetConfig::for_variant(v, sizes);
}

Checkpoint make_checkpoint(const NetConfig& net, std::uint64_t seed) {
  Checkpoint c;
  c.net = net;
  c.train.seed = seed;
  c.train.learning_rate = 3e-4;
  c.train.loss = LossKind::kL2;
  c.iteration = 17;
  c.tensors = snapshot_params(build_variant<float>(net, seed));
  c.adam.step = 17;
  Rng rng(seed);
  for (const StoredTensor& t : c.tensors) {
    AdamSlot s{t.name, Array<float>(t.data.shape()), Array<float>(t.data.shape())};
    for (std::size_t i = 0; i < s.m.size(); ++i) {
      s.m[i] = static_cast<float>(rng.uniform(-1, 1));
      s.v[i] = static_cast<float>(rng.uniform(0, 1));
    }
    c.adam.slots.push_back(std::move(s));
  }
  return c;
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

std::set<std::string> names_of(const NetConfig& cfg) {
  std::set<std::string> out;
  for (const auto& n : allocate_params<float>(cfg).named()) out.insert(n.name);
  return out;
}

}  // namespace

TEST(Fnv1a, KnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(Checkpoint, RoundTripBitwise) {
  const Checkpoint c = make_checkpoint(small(Variant::kAhdr), 1);
  const std::string bytes = encode_checkpoint(c);
  const Checkpoint back = decode_checkpoint(bytes);
  EXPECT_EQ(back, c);
  EXPECT_EQ(encode_checkpoint(back), bytes);
  TempDir d("ckpt");
  save_checkpoint(d / "a.ckpt", c);
  EXPECT_EQ(read_file(d / "a.ckpt"), bytes);
  EXPECT_EQ(load_checkpoint(d / "a.ckpt"), c);
}

TEST(Checkpoint, LayoutStartsWithMagicAndVersion) {
  const std::string bytes = encode_checkpoint(make_checkpoint(small(Variant::kRb), 2));
  EXPECT_EQ(bytes.substr(0, 8), "AHDRCKPT");
  std::uint32_t version;
  std::memcpy(&version, bytes.data() + 8, 4);
  EXPECT_EQ(version, kCheckpointVersion);
  std::uint64_t sum;
  std::memcpy(&sum, bytes.data() + bytes.size() - 8, 8);
  EXPECT_EQ(sum, fnv1a64(std::string_view(bytes).substr(0, bytes.size() - 8)));
}

TEST(Checkpoint, CorruptedByteFailsChecksum) {
  const std::string bytes = encode_checkpoint(make_checkpoint(small(Variant::kAhdr), 3));
  for (std::size_t pos : {std::size_t{14}, bytes.size() / 2, bytes.size() - 9, bytes.size() - 1}) {
    std::string bad = bytes;
    bad[pos] = static_cast<char>(bad[pos] ^ 0x10);
    EXPECT_NE(error_of([&] { decode_checkpoint(bad); }).find("checksum"), std::string::npos) << pos;
  }
}

TEST(Checkpoint, VersionMismatchAndBadMagic) {
  std::string bytes = encode_checkpoint(make_checkpoint(small(Variant::kAhdr), 4));
  std::string v2 = bytes;
  v2[8] = 2;
  const std::string msg = error_of([&] { decode_checkpoint(v2, "m.ckpt"); });
  EXPECT_NE(msg.find("version 2"), std::string::npos);
  EXPECT_NE(msg.find("m.ckpt"), std::string::npos);
  std::string magic = bytes;
  magic[0] = 'X';
  EXPECT_NE(error_of([&] { decode_checkpoint(magic); }).find("magic"), std::string::npos);
  EXPECT_NE(error_of([&] { decode_checkpoint(bytes.substr(0, 10)); }).find("checkpoint"), std::string::npos);
}

TEST(Checkpoint, RestoreIntoMatchingConfig) {
  const NetConfig cfg = small(Variant::kAhdr);
  const Checkpoint c = make_checkpoint(cfg, 5);
  const NetworkParams<float> p = restore_params(c.tensors, cfg);
  EXPECT_EQ(snapshot_params(p).size(), c.tensors.size());
  const auto snap = snapshot_params(p);
  for (std::size_t i = 0; i < snap.size(); ++i) {
    EXPECT_EQ(snap[i].name, c.tensors[i].name);
    EXPECT_EQ(snap[i].data, c.tensors[i].data);
  }
}

TEST(Checkpoint, StructuralMismatchListsNames) {
  const NetConfig saved = small(Variant::kAhdr, 1), other = small(Variant::kRdb, 2);
  const Checkpoint c = make_checkpoint(saved, 6);
  const std::set<std::string> have = names_of(saved), want = names_of(other);
  std::vector<std::string> missing, extra;
  std::set_difference(want.begin(), want.end(), have.begin(), have.end(), std::back_inserter(missing));
  std::set_difference(have.begin(), have.end(), want.begin(), want.end(), std::back_inserter(extra));
  ASSERT_FALSE(missing.empty());
  ASSERT_FALSE(extra.empty());
  const std::string msg = error_of([&] { restore_params(c.tensors, other); });
  EXPECT_NE(msg.find("missing"), std::string::npos);
  for (const auto& n : missing) EXPECT_NE(msg.find(n), std::string::npos) << n;
  for (const auto& n : extra) EXPECT_NE(msg.find(n), std::string::npos) << n;
}

TEST(Checkpoint, ShapeMismatchNamesTensor) {
  const NetConfig cfg = small(Variant::kAhdr);
  Checkpoint c = make_checkpoint(cfg, 7);
  c.tensors[0].data = Array<float>(Shape{1, 1, 1, 1});
  EXPECT_NE(error_of([&] { restore_params(c.tensors, cfg); }).find(c.tensors[0].name), std::string::npos);
  Checkpoint dup = make_checkpoint(cfg, 7);
  dup.tensors.push_back(dup.tensors[0]);
  EXPECT_NE(error_of([&] { restore_params(dup.tensors, cfg); }).find("duplicate [" + dup.tensors[0].name),
            std::string::npos);
}

TEST(Checkpoint, ConfigJsonRoundTrip) {
  NetConfig net = small(Variant::kDeepRb, 2);
  TrainConfig train;
  train.seed = 0xfedcba9876543210ULL;
  train.learning_rate = 1.0 / 3.0;
  train.augment = false;
  const std::string json = configs_to_json(net, train);
  NetConfig n2;
  TrainConfig t2;
  configs_from_json(json, n2, t2);
  EXPECT_EQ(n2, net);
  EXPECT_EQ(t2, train);
  EXPECT_THROW(configs_from_json("{", n2, t2), DataError);
}

TEST(Checkpoint, MissingFileNamesPath) {
  EXPECT_NE(error_of([] { load_checkpoint("/nonexistent/dir/x.ckpt"); }).find("x.ckpt"), std::string::npos);
}
