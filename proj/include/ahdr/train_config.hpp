// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ahdr/array.hpp"

namespace ahdr {

enum class LossKind { kL1, kL2 };

std::string_view loss_name(LossKind k);
LossKind parse_loss(std::string_view name);

struct TrainConfig {
  std::size_t batch_size = 8;
  double learning_rate = 1e-5;
  std::size_t patch_size = 256;
  LossKind loss = LossKind::kL1;
  std::size_t max_iterations = 1000;
  std::uint64_t seed = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  bool augment = true;
  double mu = 5000.0;
  double gamma = 2.2;
  std::size_t log_every = 10;
  std::size_t checkpoint_every = 0;  // 0 disables periodic checkpoints

  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// First and second moments for one named parameter.
struct AdamSlot {
  std::string name;
  Array<float> m;
  Array<float> v;
};

struct AdamState {
  std::uint64_t step = 0;
  std::vector<AdamSlot> slots;
};

}  // namespace ahdr
