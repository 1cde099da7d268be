// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ahdr/data_synth.hpp"
#include "ahdr/hdr_domain.hpp"
#include "ahdr/network.hpp"

namespace ahdr {

/// 10 log10(peak^2 / MSE) over all pixels and channels; +infinity when the
/// images are identical.
double psnr(const Array<float>& a, const Array<float>& b, double peak = 1.0);

/// PSNR after clamping both images to [0, 1] and applying the mu-law curve.
double psnr_mu(const HdrImage& pred, const HdrImage& gt, const TonemapParams& tm = {});

/// PSNR in the linear domain after clamping to [0, 1].
double psnr_l(const HdrImage& pred, const HdrImage& gt);

/// The reference exposure mapped to the HDR domain, clamped to [0, 1].
HdrImage reference_only(const SampleTriplet& s, const GammaParams& g = {});

/// Per-pixel, per-channel average of the three HDR-domain frames weighted
/// by min(I, 1 - I) of the LDR value. Where every weight vanishes the pixel
/// falls back to the shortest exposure if the reference is bright, else to
/// the longest. Clamped to [0, 1].
HdrImage baseline_merge(const SampleTriplet& s, const GammaParams& g = {});

struct EvalRow {
  std::string id;
  double psnr_mu = 0.0;
  double psnr_l = 0.0;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  double mean_psnr_mu = 0.0;
  double mean_psnr_l = 0.0;
  std::string fingerprint;
  /// Slots for externally computed scores.
  std::optional<double> psnr_m;
  std::optional<double> hdr_vdp2;

  /// Tab-separated: header, one row per sample, then a "mean" row.
  std::string to_text() const;
};

/// Fills the means from the rows.
EvalReport make_report(std::vector<EvalRow> rows, std::string fingerprint = {});

/// Scores any reconstruction function over the samples.
template <typename Fn>
EvalReport evaluate_with(std::span<const SampleTriplet> samples, Fn&& reconstruct, const TonemapParams& tm = {},
                         std::string fingerprint = {}) {
  std::vector<EvalRow> rows;
  rows.reserve(samples.size());
  for (const SampleTriplet& s : samples) {
    const HdrImage h = reconstruct(s);
    rows.push_back({s.id, psnr_mu(h, s.gt, tm), psnr_l(h, s.gt)});
  }
  return make_report(std::move(rows), std::move(fingerprint));
}

/// Network evaluation on full images.
EvalReport evaluate(const NetworkParams<float>& params, const NetConfig& cfg, std::span<const SampleTriplet> samples,
                    const GammaParams& g = {}, const TonemapParams& tm = {}, std::string fingerprint = {});

}  // namespace ahdr
