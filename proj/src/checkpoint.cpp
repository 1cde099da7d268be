// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#include "ahdr/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "ahdr/file_util.hpp"

namespace ahdr {

bool operator==(const Checkpoint& a, const Checkpoint& b) {
  if (!(a.net == b.net) || !(a.train == b.train) || a.iteration != b.iteration) return false;
  if (a.tensors.size() != b.tensors.size() || a.adam.step != b.adam.step) return false;
  if (a.adam.slots.size() != b.adam.slots.size()) return false;
  for (std::size_t i = 0; i < a.tensors.size(); ++i) {
    if (a.tensors[i].name != b.tensors[i].name) return false;
    if (a.tensors[i].data.shape() != b.tensors[i].data.shape()) return false;
    // Bitwise, so NaN payloads and signed zeros count.
    if (std::memcmp(a.tensors[i].data.data(), b.tensors[i].data.data(), a.tensors[i].data.size() * sizeof(float)))
      return false;
  }
  for (std::size_t i = 0; i < a.adam.slots.size(); ++i) {
    const AdamSlot& x = a.adam.slots[i];
    const AdamSlot& y = b.adam.slots[i];
    if (x.name != y.name || x.m.shape() != y.m.shape() || x.v.shape() != y.v.shape()) return false;
    if (std::memcmp(x.m.data(), y.m.data(), x.m.size() * sizeof(float))) return false;
    if (std::memcmp(x.v.data(), y.v.data(), x.v.size() * sizeof(float))) return false;
  }
  return true;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "checkpoint codec assumes a little-endian host");

class Writer {
 public:
  template <typename U>
  void pod(U v) {
    const auto* p = reinterpret_cast<const char*>(&v);
    out_.append(p, sizeof(U));
  }
  void str(std::string_view s) {
    pod(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }
  void shape(const Shape& s) {
    for (std::size_t e : {s.n, s.c, s.h, s.w}) pod(static_cast<std::uint64_t>(e));
  }
  void floats(const Array<float>& a) { out_.append(reinterpret_cast<const char*>(a.data()), a.size() * sizeof(float)); }
  void raw(std::string_view s) { out_.append(s); }
  std::string& bytes() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  Reader(std::string_view bytes, std::string origin) : bytes_(bytes), origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw DataError(origin_ + ": " + what + " at byte " + std::to_string(pos_));
  }
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) fail("truncated checkpoint");
  }
  template <typename U>
  U pod() {
    need(sizeof(U));
    U v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(U));
    pos_ += sizeof(U);
    return v;
  }
  std::string str() {
    const auto n = pod<std::uint32_t>();
    need(n);
    std::string s(bytes_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  Shape shape() {
    Shape s;
    s.n = pod<std::uint64_t>();
    s.c = pod<std::uint64_t>();
    s.h = pod<std::uint64_t>();
    s.w = pod<std::uint64_t>();
    if (s.n > (1u << 30) || s.c > (1u << 30) || s.h > (1u << 30) || s.w > (1u << 30)) fail("implausible tensor shape");
    return s;
  }
  template <typename U>
  Array<float> floats(const Shape& s) {
    const std::size_t n = s.numel();
    need(n * sizeof(U));
    std::vector<float> data(n);
    for (std::size_t i = 0; i < n; ++i) {
      U v;
      std::memcpy(&v, bytes_.data() + pos_ + i * sizeof(U), sizeof(U));
      data[i] = static_cast<float>(v);
    }
    pos_ += n * sizeof(U);
    return Array<float>(s, std::move(data));
  }
  std::size_t pos() const { return pos_; }

 private:
  std::string_view bytes_;
  std::string origin_;
  std::size_t pos_ = 0;
};

json net_to_json(const NetConfig& c) {
  return json{{"base_channels", c.base_channels},
              {"growth_rate", c.growth_rate},
              {"num_drdb", c.num_drdb},
              {"drdb_conv_layers", c.drdb_conv_layers},
              {"dilation", c.dilation},
              {"use_attention", c.use_attention},
              {"use_dilation", c.use_dilation},
              {"use_dense_connections", c.use_dense_connections},
              {"use_global_residual", c.use_global_residual},
              {"rb_depth_multiplier", c.rb_depth_multiplier}};
}

json train_to_json(const TrainConfig& c) {
  return json{{"batch_size", c.batch_size},
              {"learning_rate", c.learning_rate},
              {"patch_size", c.patch_size},
              {"loss", std::string(loss_name(c.loss))},
              {"max_iterations", c.max_iterations},
              {"seed", c.seed},
              {"adam_beta1", c.adam_beta1},
              {"adam_beta2", c.adam_beta2},
              {"adam_eps", c.adam_eps},
              {"augment", c.augment},
              {"mu", c.mu},
              {"gamma", c.gamma},
              {"log_every", c.log_every},
              {"checkpoint_every", c.checkpoint_every}};
}

}  // namespace

std::string configs_to_json(const NetConfig& net, const TrainConfig& train) {
  return json{{"net", net_to_json(net)}, {"train", train_to_json(train)}}.dump();
}

void configs_from_json(std::string_view text, NetConfig& net, TrainConfig& train) {
  try {
    const json j = json::parse(text);
    const json& n = j.at("net");
    n.at("base_channels").get_to(net.base_channels);
    n.at("growth_rate").get_to(net.growth_rate);
    n.at("num_drdb").get_to(net.num_drdb);
    n.at("drdb_conv_layers").get_to(net.drdb_conv_layers);
    n.at("dilation").get_to(net.dilation);
    n.at("use_attention").get_to(net.use_attention);
    n.at("use_dilation").get_to(net.use_dilation);
    n.at("use_dense_connections").get_to(net.use_dense_connections);
    n.at("use_global_residual").get_to(net.use_global_residual);
    n.at("rb_depth_multiplier").get_to(net.rb_depth_multiplier);
    const json& t = j.at("train");
    t.at("batch_size").get_to(train.batch_size);
    t.at("learning_rate").get_to(train.learning_rate);
    t.at("patch_size").get_to(train.patch_size);
    train.loss = parse_loss(t.at("loss").get<std::string>());
    t.at("max_iterations").get_to(train.max_iterations);
    t.at("seed").get_to(train.seed);
    t.at("adam_beta1").get_to(train.adam_beta1);
    t.at("adam_beta2").get_to(train.adam_beta2);
    t.at("adam_eps").get_to(train.adam_eps);
    t.at("augment").get_to(train.augment);
    t.at("mu").get_to(train.mu);
    t.at("gamma").get_to(train.gamma);
    t.at("log_every").get_to(train.log_every);
    t.at("checkpoint_every").get_to(train.checkpoint_every);
  } catch (const json::exception& e) {
    throw DataError(std::string("config block: ") + e.what());
  }
}

std::string encode_checkpoint(const Checkpoint& ckpt) {
  Writer w;
  w.raw(kCheckpointMagic);
  w.pod(kCheckpointVersion);
  w.str(configs_to_json(ckpt.net, ckpt.train));
  w.pod(static_cast<std::uint64_t>(ckpt.iteration));
  w.pod(static_cast<std::uint32_t>(ckpt.tensors.size()));
  for (const StoredTensor& t : ckpt.tensors) {
    w.str(t.name);
    w.pod(std::uint8_t{1});
    w.shape(t.data.shape());
    w.floats(t.data);
  }
  w.pod(static_cast<std::uint64_t>(ckpt.adam.step));
  w.pod(static_cast<std::uint32_t>(ckpt.adam.slots.size()));
  for (const AdamSlot& s : ckpt.adam.slots) {
    require_same_shape(s.m.shape(), s.v.shape(), "checkpoint adam slot " + s.name);
    w.str(s.name);
    w.shape(s.m.shape());
    w.floats(s.m);
    w.floats(s.v);
  }
  const std::uint64_t sum = fnv1a64(w.bytes());
  w.pod(sum);
  return std::move(w.bytes());
}

Checkpoint decode_checkpoint(std::string_view bytes, const std::string& origin) {
  if (bytes.size() < kCheckpointMagic.size() + 4 + 8 || bytes.substr(0, kCheckpointMagic.size()) != kCheckpointMagic) {
    throw DataError(origin + ": not a checkpoint (bad magic) at byte 0");
  }
  Reader r(bytes, origin);
  for (std::size_t i = 0; i < kCheckpointMagic.size(); ++i) r.pod<char>();
  const auto version = r.pod<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw DataError(origin + ": checkpoint version " + std::to_string(version) + " is not supported (expected " +
                    std::to_string(kCheckpointVersion) + ")");
  }
  const std::string_view body = bytes.substr(0, bytes.size() - 8);
  std::uint64_t stored;
  std::memcpy(&stored, bytes.data() + body.size(), 8);
  if (fnv1a64(body) != stored) throw DataError(origin + ": checkpoint checksum mismatch");

  Reader b(body, origin);
  for (std::size_t i = 0; i < kCheckpointMagic.size(); ++i) b.pod<char>();
  b.pod<std::uint32_t>();
  Checkpoint ckpt;
  configs_from_json(b.str(), ckpt.net, ckpt.train);
  ckpt.iteration = b.pod<std::uint64_t>();
  const auto count = b.pod<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    StoredTensor t;
    t.name = b.str();
    const auto dtype = b.pod<std::uint8_t>();
    const Shape s = b.shape();
    if (dtype == 1) t.data = b.floats<float>(s);
    else if (dtype == 2) t.data = b.floats<double>(s);
    else b.fail("unknown dtype code " + std::to_string(dtype) + " for tensor " + t.name);
    ckpt.tensors.push_back(std::move(t));
  }
  ckpt.adam.step = b.pod<std::uint64_t>();
  const auto slots = b.pod<std::uint32_t>();
  for (std::uint32_t i = 0; i < slots; ++i) {
    AdamSlot s;
    s.name = b.str();
    const Shape shape = b.shape();
    s.m = b.floats<float>(shape);
    s.v = b.floats<float>(shape);
    ckpt.adam.slots.push_back(std::move(s));
  }
  if (b.pos() != body.size()) b.fail("trailing bytes after checkpoint payload");
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  write_file_atomic(path, encode_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(read_file(path), path.string());
}

std::vector<StoredTensor> snapshot_params(const NetworkParams<float>& params) {
  std::vector<StoredTensor> out;
  for (const auto& [name, tensor] : params.named()) out.push_back({name, tensor.value()});
  return out;
}

NetworkParams<float> restore_params(const std::vector<StoredTensor>& tensors, const NetConfig& cfg) {
  NetworkParams<float> params = allocate_params<float>(cfg);
  auto required = params.named();
  std::map<std::string, const StoredTensor*> stored;
  std::vector<std::string> duplicates;
  for (const StoredTensor& t : tensors) {
    if (!stored.emplace(t.name, &t).second) duplicates.push_back(t.name);
  }
  std::set<std::string> required_names;
  std::vector<std::string> missing;
  for (const auto& r : required) {
    required_names.insert(r.name);
    if (!stored.contains(r.name)) missing.push_back(r.name);
  }
  std::vector<std::string> extra;
  for (const auto& [name, _] : stored)
    if (!required_names.contains(name)) extra.push_back(name);
  if (!missing.empty() || !extra.empty() || !duplicates.empty()) {
    const auto join = [](const std::vector<std::string>& v) {
      std::string s;
      for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
      return s.empty() ? std::string("none") : s;
    };
    throw DataError("checkpoint does not match network structure: missing [" + join(missing) + "]; extra [" +
                    join(extra) + "]; duplicate [" + join(duplicates) + "]");
  }
  for (auto& r : required) {
    const StoredTensor& t = *stored.at(r.name);
    if (t.data.shape() != r.tensor.shape()) {
      throw DataError("checkpoint tensor " + r.name + " has shape " + t.data.shape().str() + ", expected " +
                      r.tensor.shape().str());
    }
    r.tensor.mutable_value() = t.data;
  }
  return params;
}

}  // namespace ahdr
