// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#include "ahdr/network.hpp"

#include <functional>

#include "ahdr/init.hpp"
#include "ahdr/rng.hpp"

namespace ahdr {

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::kAhdr: return "ahdr";
    case Variant::kDrdb: return "drdb";
    case Variant::kARdb: return "a-rdb";
    case Variant::kRdb: return "rdb";
    case Variant::kRb: return "rb";
    case Variant::kDeepRb: return "deep-rb";
    case Variant::kNoGrl: return "no-grl";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  for (Variant v : {Variant::kAhdr, Variant::kDrdb, Variant::kARdb, Variant::kRdb, Variant::kRb, Variant::kDeepRb,
                    Variant::kNoGrl}) {
    if (variant_name(v) == name) return v;
  }
  throw ConfigError("unknown variant '" + std::string(name) + "'");
}

void NetConfig::validate() const {
  if (base_channels == 0) throw ConfigError("base_channels must be > 0");
  if (growth_rate == 0) throw ConfigError("growth_rate must be > 0");
  if (num_drdb == 0) throw ConfigError("num_drdb must be >= 1");
  if (drdb_conv_layers < 2) throw ConfigError("drdb_conv_layers must be >= 2");
  if (dilation == 0) throw ConfigError("dilation must be >= 1");
  if (rb_depth_multiplier == 0) throw ConfigError("rb_depth_multiplier must be >= 1");
  if (use_dilation && dilation < 2) throw ConfigError("use_dilation set but dilation is 1");
  if (use_dense_connections && rb_depth_multiplier != 1) {
    throw ConfigError("rb_depth_multiplier applies only when dense connections are off");
  }
}

NetConfig NetConfig::for_variant(Variant v, const NetConfig& sizes) {
  NetConfig c = sizes;
  c.use_attention = true;
  c.use_dilation = true;
  c.use_dense_connections = true;
  c.use_global_residual = true;
  c.rb_depth_multiplier = 1;
  if (c.dilation < 2) c.dilation = 2;
  switch (v) {
    case Variant::kAhdr: break;
    case Variant::kDrdb: c.use_attention = false; break;
    case Variant::kARdb: c.use_dilation = false; break;
    case Variant::kRdb:
      c.use_attention = false;
      c.use_dilation = false;
      break;
    case Variant::kRb:
    case Variant::kDeepRb:
      c.use_attention = false;
      c.use_dilation = false;
      c.use_dense_connections = false;
      c.rb_depth_multiplier = v == Variant::kDeepRb ? 2 : 1;
      break;
    case Variant::kNoGrl: c.use_global_residual = false; break;
  }
  return c;
}

NetConfig NetConfig::for_variant(Variant v) { return for_variant(v, NetConfig{}); }

namespace {

template <typename T>
ConvParams<T> make_conv(std::size_t in, std::size_t out, std::size_t kernel, std::size_t dilation) {
  ConvParams<T> p;
  p.spec = ConvSpec{in, out, kernel, dilation};
  p.weight = Tensor<T>::parameter(Array<T>(p.spec.weight_shape()));
  p.bias = Tensor<T>::parameter(Array<T>(p.spec.bias_shape()));
  return p;
}

template <typename T>
void push_conv(std::vector<NamedTensor<T>>& out, const std::string& prefix, const ConvParams<T>& p) {
  out.push_back({prefix + ".weight", p.weight});
  out.push_back({prefix + ".bias", p.bias});
}

}  // namespace

template <typename T>
std::vector<NamedTensor<T>> NetworkParams<T>::named() const {
  std::vector<NamedTensor<T>> out;
  push_conv(out, "encoder", encoder);
  if (attention_low) {
    push_conv(out, "attention_low.conv1", attention_low->conv1);
    push_conv(out, "attention_low.conv2", attention_low->conv2);
  }
  if (attention_high) {
    push_conv(out, "attention_high.conv1", attention_high->conv1);
    push_conv(out, "attention_high.conv2", attention_high->conv2);
  }
  push_conv(out, "merge_head", merge_head);
  for (std::size_t k = 0; k < drdbs.size(); ++k) {
    const std::string prefix = "drdb" + std::to_string(k);
    for (std::size_t j = 0; j < drdbs[k].dense.size(); ++j) {
      push_conv(out, prefix + ".dense" + std::to_string(j), drdbs[k].dense[j]);
    }
    push_conv(out, prefix + ".compress", drdbs[k].compress);
  }
  for (std::size_t k = 0; k < res_blocks.size(); ++k) {
    const std::string prefix = "rb" + std::to_string(k);
    push_conv(out, prefix + ".conv1", res_blocks[k].conv1);
    push_conv(out, prefix + ".conv2", res_blocks[k].conv2);
  }
  push_conv(out, "fuse", fuse);
  push_conv(out, "tail1", tail1);
  push_conv(out, "tail2", tail2);
  return out;
}

template <typename T>
std::size_t NetworkParams<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& t : named()) n += t.tensor.shape().numel();
  return n;
}

template <typename T>
NetworkParams<T> allocate_params(const NetConfig& cfg) {
  cfg.validate();
  const std::size_t c = cfg.base_channels;
  const std::size_t dil = cfg.effective_dilation();
  NetworkParams<T> p;
  p.encoder = make_conv<T>(6, c, 3, 1);
  if (cfg.use_attention) {
    p.attention_low = AttentionParams<T>{make_conv<T>(2 * c, c, 3, 1), make_conv<T>(c, c, 3, 1)};
    p.attention_high = AttentionParams<T>{make_conv<T>(2 * c, c, 3, 1), make_conv<T>(c, c, 3, 1)};
  }
  p.merge_head = make_conv<T>(3 * c, c, 3, 1);
  if (cfg.use_dense_connections) {
    for (std::size_t k = 0; k < cfg.num_drdb; ++k) {
      DrdbParams<T> block;
      const std::size_t dense_layers = cfg.drdb_conv_layers - 1;
      for (std::size_t j = 0; j < dense_layers; ++j) {
        block.dense.push_back(make_conv<T>(c + j * cfg.growth_rate, cfg.growth_rate, 3, dil));
      }
      block.compress = make_conv<T>(c + dense_layers * cfg.growth_rate, c, 1, 1);
      p.drdbs.push_back(std::move(block));
    }
  } else {
    for (std::size_t k = 0; k < cfg.num_blocks(); ++k) {
      p.res_blocks.push_back(ResBlockParams<T>{make_conv<T>(c, c, 3, dil), make_conv<T>(c, c, 3, dil)});
    }
  }
  p.fuse = make_conv<T>(cfg.num_blocks() * c, c, 3, 1);
  p.tail1 = make_conv<T>(c, c, 3, 1);
  p.tail2 = make_conv<T>(c, 3, 3, 1);
  return p;
}

template <typename T>
NetworkParams<T> build_variant(const NetConfig& cfg, std::uint64_t seed) {
  NetworkParams<T> p = allocate_params<T>(cfg);
  std::uint64_t index = 0;
  for (auto& [name, tensor] : p.named()) {
    // Weights are rank-4 with a kernel; biases are (1, C, 1, 1) and stay zero.
    if (name.ends_with(".weight")) {
      tensor.mutable_value() = xavier_init<T>(tensor.shape(), derive_seed(seed, {index}));
    }
    ++index;
  }
  return p;
}

template <typename T>
std::size_t drdb_parameter_count(const DrdbParams<T>& p) {
  std::size_t n = 0;
  for (const auto& d : p.dense) n += d.weight.shape().numel() + d.bias.shape().numel();
  return n + p.compress.weight.shape().numel() + p.compress.bias.shape().numel();
}

template <typename T>
Tensor<T> apply_conv(Tape<T>& tape, const Tensor<T>& x, const ConvParams<T>& p) {
  return conv2d(tape, x, p.weight, p.bias, p.spec);
}

template <typename T>
Tensor<T> encode(Tape<T>& tape, const Tensor<T>& x, const NetworkParams<T>& params) {
  return relu(tape, apply_conv(tape, x, params.encoder));
}

template <typename T>
Tensor<T> attention_forward(Tape<T>& tape, const Tensor<T>& z_i, const Tensor<T>& z_r, const AttentionParams<T>& p) {
  require_same_shape(z_i.shape(), z_r.shape(), "attention");
  const Tensor<T> joined = concat_channels(tape, {z_i, z_r});
  const Tensor<T> hidden = relu(tape, apply_conv(tape, joined, p.conv1));
  return sigmoid(tape, apply_conv(tape, hidden, p.conv2));
}

template <typename T>
Tensor<T> attend(Tape<T>& tape, const Tensor<T>& z_i, const Tensor<T>& a_i) {
  return mul(tape, a_i, z_i);
}

template <typename T>
Tensor<T> stack_features(Tape<T>& tape, const Tensor<T>& z1p, const Tensor<T>& z2, const Tensor<T>& z3p) {
  require_same_shape(z1p.shape(), z2.shape(), "stack_features");
  require_same_shape(z3p.shape(), z2.shape(), "stack_features");
  return concat_channels(tape, {z1p, z2, z3p});
}

template <typename T>
Tensor<T> drdb_forward(Tape<T>& tape, const Tensor<T>& f_in, const DrdbParams<T>& p, const NetConfig& cfg) {
  if (f_in.shape().c != cfg.base_channels) {
    throw DimensionError("channels", "drdb: input has " + std::to_string(f_in.shape().c) + " channels, config says " +
                                         std::to_string(cfg.base_channels));
  }
  std::vector<Tensor<T>> features{f_in};
  for (const ConvParams<T>& layer : p.dense) {
    const Tensor<T> joined = features.size() == 1 ? f_in : concat_channels<T>(tape, features);
    features.push_back(relu(tape, apply_conv(tape, joined, layer)));
  }
  const Tensor<T> compressed = apply_conv(tape, concat_channels<T>(tape, features), p.compress);
  return add(tape, compressed, f_in);
}

template <typename T>
Tensor<T> res_block_forward(Tape<T>& tape, const Tensor<T>& f_in, const ResBlockParams<T>& p) {
  const Tensor<T> hidden = relu(tape, apply_conv(tape, f_in, p.conv1));
  return add(tape, apply_conv(tape, hidden, p.conv2), f_in);
}

template <typename T>
Tensor<T> merge_forward(Tape<T>& tape, const Tensor<T>& z_s, const Tensor<T>& z_r, const NetworkParams<T>& params,
                        const NetConfig& cfg) {
  const std::size_t c = cfg.base_channels;
  if (z_s.shape().c != 3 * c) {
    throw DimensionError("channels", "merge: stacked features have " + std::to_string(z_s.shape().c) +
                                         " channels, expected " + std::to_string(3 * c));
  }
  if (z_r.shape().c != c) throw DimensionError("channels", "merge: reference features must have C channels");
  const std::size_t expected_blocks = cfg.num_blocks();
  const std::size_t blocks = cfg.use_dense_connections ? params.drdbs.size() : params.res_blocks.size();
  if (blocks != expected_blocks) throw ConfigError("merge: parameter set does not match config block count");

  Tensor<T> f = relu(tape, apply_conv(tape, z_s, params.merge_head));
  std::vector<Tensor<T>> block_outputs;
  for (std::size_t k = 0; k < blocks; ++k) {
    f = cfg.use_dense_connections ? drdb_forward(tape, f, params.drdbs[k], cfg)
                                  : res_block_forward(tape, f, params.res_blocks[k]);
    block_outputs.push_back(f);
  }
  const Tensor<T> f4 = block_outputs.size() == 1 ? block_outputs.front() : concat_channels<T>(tape, block_outputs);
  Tensor<T> f5 = relu(tape, apply_conv(tape, f4, params.fuse));
  const Tensor<T> f6 = cfg.use_global_residual ? add(tape, f5, z_r) : f5;
  const Tensor<T> f7 = relu(tape, apply_conv(tape, f6, params.tail1));
  return sigmoid(tape, apply_conv(tape, f7, params.tail2));
}

template <typename T>
ForwardResult<T> ahdr_forward(Tape<T>& tape, const Tensor<T>& x1, const Tensor<T>& x2, const Tensor<T>& x3,
                              const NetworkParams<T>& params, const NetConfig& cfg) {
  require_same_shape(x1.shape(), x2.shape(), "ahdr_forward");
  require_same_shape(x3.shape(), x2.shape(), "ahdr_forward");
  if (cfg.use_attention != params.attention_low.has_value()) {
    throw ConfigError("ahdr_forward: attention parameters do not match config");
  }
  const Tensor<T> z1 = encode(tape, x1, params);
  const Tensor<T> z2 = encode(tape, x2, params);
  const Tensor<T> z3 = encode(tape, x3, params);
  ForwardResult<T> result;
  Tensor<T> z1p = z1, z3p = z3;
  if (cfg.use_attention) {
    result.attention_low = attention_forward(tape, z1, z2, *params.attention_low);
    result.attention_high = attention_forward(tape, z3, z2, *params.attention_high);
    z1p = attend(tape, z1, result.attention_low);
    z3p = attend(tape, z3, result.attention_high);
  }
  const Tensor<T> zs = stack_features(tape, z1p, z2, z3p);
  result.hdr = merge_forward(tape, zs, z2, params, cfg);
  return result;
}

template <typename To, typename From>
NetworkParams<To> convert_params(const NetworkParams<From>& src, const NetConfig& cfg) {
  NetworkParams<To> out = allocate_params<To>(cfg);
  const auto from = src.named();
  auto to = out.named();
  if (from.size() != to.size()) throw ConfigError("convert_params: parameter set does not match config");
  for (std::size_t i = 0; i < to.size(); ++i) {
    require_same_shape(from[i].tensor.shape(), to[i].tensor.shape(), "convert_params " + to[i].name);
    to[i].tensor.mutable_value() = cast<To>(from[i].tensor.value());
  }
  return out;
}

#define AHDR_INSTANTIATE_NETWORK(T)                                                                             \
  template struct NetworkParams<T>;                                                                             \
  template NetworkParams<T> allocate_params<T>(const NetConfig&);                                               \
  template NetworkParams<T> build_variant<T>(const NetConfig&, std::uint64_t);                                  \
  template std::size_t drdb_parameter_count<T>(const DrdbParams<T>&);                                           \
  template Tensor<T> apply_conv<T>(Tape<T>&, const Tensor<T>&, const ConvParams<T>&);                          \
  template Tensor<T> encode<T>(Tape<T>&, const Tensor<T>&, const NetworkParams<T>&);                            \
  template Tensor<T> attention_forward<T>(Tape<T>&, const Tensor<T>&, const Tensor<T>&, const AttentionParams<T>&); \
  template Tensor<T> attend<T>(Tape<T>&, const Tensor<T>&, const Tensor<T>&);                                   \
  template Tensor<T> stack_features<T>(Tape<T>&, const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);         \
  template Tensor<T> drdb_forward<T>(Tape<T>&, const Tensor<T>&, const DrdbParams<T>&, const NetConfig&);       \
  template Tensor<T> res_block_forward<T>(Tape<T>&, const Tensor<T>&, const ResBlockParams<T>&);                \
  template Tensor<T> merge_forward<T>(Tape<T>&, const Tensor<T>&, const Tensor<T>&, const NetworkParams<T>&,    \
                                      const NetConfig&);                                                        \
  template ForwardResult<T> ahdr_forward<T>(Tape<T>&, const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,     \
                                            const NetworkParams<T>&, const NetConfig&);

AHDR_INSTANTIATE_NETWORK(float)
AHDR_INSTANTIATE_NETWORK(double)

#undef AHDR_INSTANTIATE_NETWORK

template NetworkParams<double> convert_params<double, float>(const NetworkParams<float>&, const NetConfig&);
template NetworkParams<float> convert_params<float, double>(const NetworkParams<double>&, const NetConfig&);

}  // namespace ahdr
