// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ahdr/ops.hpp"

namespace ahdr {

/// The full model and its ablations.
enum class Variant {
  kAhdr,    // attention + dilated residual dense blocks + global residual
  kDrdb,    // no attention
  kARdb,    // no dilation
  kRdb,     // no attention, no dilation
  kRb,      // plain residual blocks, no attention, no dilation
  kDeepRb,  // kRb with twice the blocks
  kNoGrl,   // no global residual
};

std::string_view variant_name(Variant v);
/// Accepts the CLI spellings: ahdr, drdb, a-rdb, rdb, rb, deep-rb, no-grl.
Variant parse_variant(std::string_view name);

struct NetConfig {
  std::size_t base_channels = 64;
  std::size_t growth_rate = 32;
  std::size_t num_drdb = 3;
  std::size_t drdb_conv_layers = 6;  // dense 3x3 layers plus the final 1x1 compression
  std::size_t dilation = 2;
  bool use_attention = true;
  bool use_dilation = true;
  bool use_dense_connections = true;
  bool use_global_residual = true;
  std::size_t rb_depth_multiplier = 1;

  /// Throws ConfigError on invalid or contradictory settings.
  void validate() const;
  std::size_t effective_dilation() const { return use_dilation ? dilation : 1; }
  /// Blocks in the merging trunk: DRDBs, or residual blocks for RB variants.
  std::size_t num_blocks() const { return use_dense_connections ? num_drdb : num_drdb * rb_depth_multiplier; }

  /// Flags for `v` applied on top of the sizes in `sizes`.
  static NetConfig for_variant(Variant v, const NetConfig& sizes);
  static NetConfig for_variant(Variant v);

  friend bool operator==(const NetConfig&, const NetConfig&) = default;
};

template <typename T>
struct ConvParams {
  ConvSpec spec;
  Tensor<T> weight;
  Tensor<T> bias;
};

/// Two 3x3 convs: 2C -> C (ReLU) then C -> C (sigmoid).
template <typename T>
struct AttentionParams {
  ConvParams<T> conv1;
  ConvParams<T> conv2;
};

/// Dense layer j maps C + j*growth -> growth channels; the compression maps
/// C + (L-1)*growth -> C with a 1x1 kernel.
template <typename T>
struct DrdbParams {
  std::vector<ConvParams<T>> dense;
  ConvParams<T> compress;
};

/// Two channel-preserving 3x3 convs with an identity skip.
template <typename T>
struct ResBlockParams {
  ConvParams<T> conv1;
  ConvParams<T> conv2;
};

template <typename T>
struct NamedTensor {
  std::string name;
  Tensor<T> tensor;
};

template <typename T>
struct NetworkParams {
  ConvParams<T> encoder;                         // 6 -> C, shared by all inputs
  std::optional<AttentionParams<T>> attention_low;   // a_1
  std::optional<AttentionParams<T>> attention_high;  // a_3
  ConvParams<T> merge_head;                      // 3C -> C
  std::vector<DrdbParams<T>> drdbs;
  std::vector<ResBlockParams<T>> res_blocks;
  ConvParams<T> fuse;                            // blocks*C -> C
  ConvParams<T> tail1;                           // C -> C
  ConvParams<T> tail2;                           // C -> 3

  /// Every tensor with a stable dotted name, in a fixed order.
  std::vector<NamedTensor<T>> named() const;
  std::size_t parameter_count() const;
};

/// Zero-valued, grad-enabled parameters with the shapes `cfg` requires.
template <typename T>
NetworkParams<T> allocate_params(const NetConfig& cfg);

/// Xavier-initialized weights and zero biases. Bit-identical per seed.
template <typename T>
NetworkParams<T> build_variant(const NetConfig& cfg, std::uint64_t seed);

template <typename T>
std::size_t drdb_parameter_count(const DrdbParams<T>& p);

template <typename T>
Tensor<T> apply_conv(Tape<T>& tape, const Tensor<T>& x, const ConvParams<T>& p);

/// Z_i = ReLU(conv(X_i)).
template <typename T>
Tensor<T> encode(Tape<T>& tape, const Tensor<T>& x, const NetworkParams<T>& params);

/// A_i = sigmoid(conv2(ReLU(conv1([Z_i, Z_r])))), values in (0, 1).
template <typename T>
Tensor<T> attention_forward(Tape<T>& tape, const Tensor<T>& z_i, const Tensor<T>& z_r, const AttentionParams<T>& p);

/// Z'_i = A_i * Z_i.
template <typename T>
Tensor<T> attend(Tape<T>& tape, const Tensor<T>& z_i, const Tensor<T>& a_i);

/// [Z'_1, Z_2, Z'_3] along channels.
template <typename T>
Tensor<T> stack_features(Tape<T>& tape, const Tensor<T>& z1p, const Tensor<T>& z2, const Tensor<T>& z3p);

template <typename T>
Tensor<T> drdb_forward(Tape<T>& tape, const Tensor<T>& f_in, const DrdbParams<T>& p, const NetConfig& cfg);

template <typename T>
Tensor<T> res_block_forward(Tape<T>& tape, const Tensor<T>& f_in, const ResBlockParams<T>& p);

/// F_0 = ReLU(head(Z_s)); F_k = block_k(F_{k-1}); F_5 = ReLU(fuse([F_1..F_k]));
/// F_6 = F_5 + Z_r; F_7 = ReLU(tail1(F_6)); H = sigmoid(tail2(F_7)).
template <typename T>
Tensor<T> merge_forward(Tape<T>& tape, const Tensor<T>& z_s, const Tensor<T>& z_r, const NetworkParams<T>& params,
                        const NetConfig& cfg);

template <typename T>
struct ForwardResult {
  Tensor<T> hdr;             // (N, 3, H, W) in (0, 1)
  Tensor<T> attention_low;   // undefined when attention is off
  Tensor<T> attention_high;
};

/// Full model on the three 6-channel inputs, sorted by exposure; x2 is the
/// reference.
template <typename T>
ForwardResult<T> ahdr_forward(Tape<T>& tape, const Tensor<T>& x1, const Tensor<T>& x2, const Tensor<T>& x3,
                              const NetworkParams<T>& params, const NetConfig& cfg);

/// Copy of `src` converted to another precision.
template <typename To, typename From>
NetworkParams<To> convert_params(const NetworkParams<From>& src, const NetConfig& cfg);

}  // namespace ahdr
