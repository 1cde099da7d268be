// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>

#include "ahdr/array.hpp"
#include "ahdr/ops.hpp"

namespace ahdr {

struct GammaParams {
  double gamma = 2.2;
  void validate() const {
    if (!(gamma > 1.0)) throw ConfigError("gamma must be > 1");
  }
};

struct TonemapParams {
  double mu = 5000.0;
  void validate() const {
    if (!(mu > 0.0)) throw ConfigError("mu must be > 0");
  }
};

/// An LDR frame in [0,1] with its exposure. Exposure times are relative to
/// the reference frame, which has t = 1; a bias of b stops gives t = 2^b.
struct ExposureImage {
  Array<float> ldr;  // (1, 3, H, W)
  int bias = 0;
  double exposure_time = 1.0;

  static ExposureImage from_bias(Array<float> ldr, int bias) {
    return ExposureImage{std::move(ldr), bias, std::ldexp(1.0, bias)};
  }
};

/// Linear radiance; ground truth lives in [0,1].
struct HdrImage {
  Array<float> radiance;  // (1, 3, H, W)
};

/// I^gamma / t, elementwise. Not clamped: short exposures exceed 1.
template <typename T>
Array<T> ldr_to_hdr_domain(const Array<T>& ldr, double exposure_time, const GammaParams& g = {});

Array<float> ldr_to_hdr_domain(const ExposureImage& img, const GammaParams& g = {});

/// [I, I^gamma / t] along channels: (N, 3, H, W) -> (N, 6, H, W).
template <typename T>
Array<T> build_input(const Array<T>& ldr, double exposure_time, const GammaParams& g = {});

Array<float> build_input(const ExposureImage& img, const GammaParams& g = {});

/// log(1 + mu h) / log(1 + mu). Defined for h >= 0; callers clamp to [0,1].
template <typename T>
Array<T> mu_law_tonemap(const Array<T>& h, const TonemapParams& p = {});

/// Differentiable form used by the training losses.
template <typename T>
Tensor<T> mu_law_tonemap(Tape<T>& tape, const Tensor<T>& h, const TonemapParams& p = {});

/// Copy with every element clamped into [lo, hi].
template <typename T>
Array<T> clamp_values(const Array<T>& a, T lo = T{0}, T hi = T{1});

}  // namespace ahdr
