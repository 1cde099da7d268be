// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>

#include "ahdr/hdr_domain.hpp"
#include "ahdr/network.hpp"

namespace ahdr {

struct Prediction {
  HdrImage hdr;
  Array<float> attention_low;   // (1, C, H, W); empty when attention is off
  Array<float> attention_high;
};

/// Runs the network without recording gradients on three exposures sorted
/// by exposure time. All three must share the same (1, 3, H, W) shape.
Prediction predict(const NetworkParams<float>& params, const NetConfig& cfg, const std::array<ExposureImage, 3>& ldrs,
                   const GammaParams& g = {});

}  // namespace ahdr
