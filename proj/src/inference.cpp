// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#include "ahdr/inference.hpp"

namespace ahdr {

Prediction predict(const NetworkParams<float>& params, const NetConfig& cfg, const std::array<ExposureImage, 3>& ldrs,
                   const GammaParams& g) {
  for (std::size_t f = 0; f < 3; ++f) {
    const Shape& s = ldrs[f].ldr.shape();
    if (s.n != 1) throw DimensionError("batch", "predict expects single images, got " + s.str());
    if (s.c != 3) throw DimensionError("channels", "LDR images need 3 channels, got " + s.str());
    require_same_shape(ldrs[0].ldr.shape(), s, "predict");
  }
  for (std::size_t f = 1; f < 3; ++f) {
    if (!(ldrs[f].exposure_time > ldrs[f - 1].exposure_time)) {
      throw ConfigError("exposures must be sorted by strictly increasing exposure time");
    }
  }
  Tape<float> tape(false);
  const Tensor<float> x1(build_input(ldrs[0], g)), x2(build_input(ldrs[1], g)), x3(build_input(ldrs[2], g));
  const ForwardResult<float> out = ahdr_forward(tape, x1, x2, x3, params, cfg);
  Prediction p;
  p.hdr.radiance = out.hdr.value();
  if (out.attention_low.defined()) p.attention_low = out.attention_low.value();
  if (out.attention_high.defined()) p.attention_high = out.attention_high.value();
  return p;
}

}  // namespace ahdr
