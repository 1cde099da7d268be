// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#include "ahdr/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "ahdr/inference.hpp"

namespace ahdr {

double psnr(const Array<float>& a, const Array<float>& b, double peak) {
  require_same_shape(a.shape(), b.shape(), "psnr");
  if (a.size() == 0) throw DimensionError("numel", "psnr of empty images");
  if (!(peak > 0.0)) throw ConfigError("psnr peak must be positive");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    sum += d * d;
  }
  const double mse = sum / static_cast<double>(a.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

double psnr_mu(const HdrImage& pred, const HdrImage& gt, const TonemapParams& tm) {
  return psnr(mu_law_tonemap(clamp_values(pred.radiance), tm), mu_law_tonemap(clamp_values(gt.radiance), tm));
}

double psnr_l(const HdrImage& pred, const HdrImage& gt) {
  return psnr(clamp_values(pred.radiance), clamp_values(gt.radiance));
}

HdrImage reference_only(const SampleTriplet& s, const GammaParams& g) {
  return HdrImage{clamp_values(ldr_to_hdr_domain(s.ldrs[1], g))};
}

HdrImage baseline_merge(const SampleTriplet& s, const GammaParams& g) {
  std::array<Array<float>, 3> h;
  for (std::size_t f = 0; f < 3; ++f) {
    require_same_shape(s.ldrs[0].ldr.shape(), s.ldrs[f].ldr.shape(), "baseline_merge");
    h[f] = ldr_to_hdr_domain(s.ldrs[f], g);
  }
  Array<float> out(s.ldrs[0].ldr.shape());
  for (std::size_t i = 0; i < out.size(); ++i) {
    double wsum = 0.0;
    double acc = 0.0;
    for (std::size_t f = 0; f < 3; ++f) {
      const double v = s.ldrs[f].ldr[i];
      const double w = std::max(0.0, std::min(v, 1.0 - v));
      wsum += w;
      acc += w * static_cast<double>(h[f][i]);
    }
    double merged;
    if (wsum > 1e-6) {
      merged = acc / wsum;
    } else {
      merged = s.ldrs[1].ldr[i] >= 0.5f ? h[0][i] : h[2][i];
    }
    out[i] = static_cast<float>(std::clamp(merged, 0.0, 1.0));
  }
  return HdrImage{std::move(out)};
}

namespace {

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

std::string EvalReport::to_text() const {
  std::string out = "# fingerprint " + (fingerprint.empty() ? std::string("-") : fingerprint) + "\n";
  out += "sample\tpsnr_mu\tpsnr_l\n";
  for (const EvalRow& r : rows) out += r.id + "\t" + fmt(r.psnr_mu) + "\t" + fmt(r.psnr_l) + "\n";
  out += "mean\t" + fmt(mean_psnr_mu) + "\t" + fmt(mean_psnr_l) + "\n";
  if (psnr_m) out += "# psnr_m " + fmt(*psnr_m) + "\n";
  if (hdr_vdp2) out += "# hdr_vdp2 " + fmt(*hdr_vdp2) + "\n";
  return out;
}

EvalReport make_report(std::vector<EvalRow> rows, std::string fingerprint) {
  EvalReport r;
  r.rows = std::move(rows);
  r.fingerprint = std::move(fingerprint);
  double mu = 0.0, l = 0.0;
  for (const EvalRow& row : r.rows) {
    mu += row.psnr_mu;
    l += row.psnr_l;
  }
  if (!r.rows.empty()) {
    r.mean_psnr_mu = mu / static_cast<double>(r.rows.size());
    r.mean_psnr_l = l / static_cast<double>(r.rows.size());
  }
  return r;
}

EvalReport evaluate(const NetworkParams<float>& params, const NetConfig& cfg, std::span<const SampleTriplet> samples,
                    const GammaParams& g, const TonemapParams& tm, std::string fingerprint) {
  return evaluate_with(
      samples, [&](const SampleTriplet& s) { return predict(params, cfg, s.ldrs, g).hdr; }, tm,
      std::move(fingerprint));
}

}  // namespace ahdr
