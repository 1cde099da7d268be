// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#include "ahdr/hdr_domain.hpp"

#include <algorithm>
#include <string>

namespace ahdr {
namespace {

void require_exposure(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("exposure time must be positive, got " + std::to_string(t));
}

}  // namespace

template <typename T>
Array<T> ldr_to_hdr_domain(const Array<T>& ldr, double exposure_time, const GammaParams& g) {
  require_exposure(exposure_time);
  g.validate();
  Array<T> out(ldr.shape());
  for (std::size_t i = 0; i < ldr.size(); ++i) {
    out[i] = static_cast<T>(std::pow(static_cast<double>(ldr[i]), g.gamma) / exposure_time);
  }
  return out;
}

Array<float> ldr_to_hdr_domain(const ExposureImage& img, const GammaParams& g) {
  return ldr_to_hdr_domain<float>(img.ldr, img.exposure_time, g);
}

template <typename T>
Array<T> build_input(const Array<T>& ldr, double exposure_time, const GammaParams& g) {
  if (ldr.shape().c != 3) {
    throw DimensionError("channels", "build_input expects 3-channel LDR, got " + ldr.shape().str());
  }
  const Array<T> parts[2] = {ldr, ldr_to_hdr_domain<T>(ldr, exposure_time, g)};
  return channel_concat<T>(parts);
}

Array<float> build_input(const ExposureImage& img, const GammaParams& g) {
  return build_input<float>(img.ldr, img.exposure_time, g);
}

template <typename T>
Array<T> mu_law_tonemap(const Array<T>& h, const TonemapParams& p) {
  p.validate();
  const double norm = std::log1p(p.mu);
  Array<T> out(h.shape());
  for (std::size_t i = 0; i < h.size(); ++i) {
    out[i] = static_cast<T>(std::log1p(p.mu * static_cast<double>(h[i])) / norm);
  }
  return out;
}

template <typename T>
Tensor<T> mu_law_tonemap(Tape<T>& tape, const Tensor<T>& h, const TonemapParams& p) {
  p.validate();
  const double mu = p.mu;
  const double norm = std::log1p(mu);
  return map_elementwise(
      tape, h, [mu, norm](T v) { return static_cast<T>(std::log1p(mu * static_cast<double>(v)) / norm); },
      [mu, norm](T v, T) { return static_cast<T>(mu / ((1.0 + mu * static_cast<double>(v)) * norm)); });
}

template <typename T>
Array<T> clamp_values(const Array<T>& a, T lo, T hi) {
  Array<T> out(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::clamp(a[i], lo, hi);
  return out;
}

#define AHDR_INSTANTIATE_DOMAIN(T)                                                          \
  template Array<T> ldr_to_hdr_domain<T>(const Array<T>&, double, const GammaParams&);     \
  template Array<T> build_input<T>(const Array<T>&, double, const GammaParams&);           \
  template Array<T> mu_law_tonemap<T>(const Array<T>&, const TonemapParams&);              \
  template Tensor<T> mu_law_tonemap<T>(Tape<T>&, const Tensor<T>&, const TonemapParams&); \
  template Array<T> clamp_values<T>(const Array<T>&, T, T);

AHDR_INSTANTIATE_DOMAIN(float)
AHDR_INSTANTIATE_DOMAIN(double)

#undef AHDR_INSTANTIATE_DOMAIN

}  // namespace ahdr
