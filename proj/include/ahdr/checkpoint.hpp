// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ahdr/network.hpp"
#include "ahdr/train_config.hpp"

namespace ahdr {

inline constexpr std::string_view kCheckpointMagic = "AHDRCKPT";
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct StoredTensor {
  std::string name;
  Array<float> data;
};

/// Everything needed to resume training or run inference.
///
/// File layout (little-endian): magic, u32 version, u32 + JSON configs,
/// u64 iteration, tensor table (u32 count; per entry u32 name length, name,
/// u8 dtype [1 = f32, 2 = f64], 4 x u64 shape, raw data), Adam table (u64
/// step, u32 count; per entry name, 4 x u64 shape, m, v as f32), then a u64
/// FNV-1a checksum of all preceding bytes.
struct Checkpoint {
  NetConfig net;
  TrainConfig train;
  std::uint64_t iteration = 0;
  std::vector<StoredTensor> tensors;
  AdamState adam;

  friend bool operator==(const Checkpoint&, const Checkpoint&);
};

std::uint64_t fnv1a64(std::string_view bytes);

std::string encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(std::string_view bytes, const std::string& origin = "<memory>");
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Snapshot of parameter values.
std::vector<StoredTensor> snapshot_params(const NetworkParams<float>& params);

/// Parameters for `cfg` filled from the tensor table. Throws DataError
/// listing missing and extra names, or naming the first shape mismatch.
NetworkParams<float> restore_params(const std::vector<StoredTensor>& tensors, const NetConfig& cfg);

/// JSON round trip of the configs (also used for fingerprints).
std::string configs_to_json(const NetConfig& net, const TrainConfig& train);
void configs_from_json(std::string_view json, NetConfig& net, TrainConfig& train);

}  // namespace ahdr
