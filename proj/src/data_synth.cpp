// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#include "ahdr/data_synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ahdr/dataset_io.hpp"

namespace ahdr {

void SceneSpec::validate() const {
  if (width == 0 || height == 0) throw ConfigError("scene: degenerate canvas " + std::to_string(width) + "x" +
                                                   std::to_string(height));
  const BackgroundSpec& b = background;
  if (!(b.radiance_min > 0.0) || !(b.radiance_max >= b.radiance_min) || b.radiance_max > 1.0) {
    throw ConfigError("scene: background radiance range must satisfy 0 < min <= max <= 1");
  }
  for (const SceneObject& o : objects) {
    for (double r : o.radiance)
      if (r < 0.0 || r > 1.0) throw ConfigError("scene: object radiance outside [0, 1]");
    if (o.center_x - o.half_width < 0.0 || o.center_x + o.half_width > static_cast<double>(width) ||
        o.center_y - o.half_height < 0.0 || o.center_y + o.half_height > static_cast<double>(height)) {
      throw ConfigError("scene: object outside the canvas in the reference frame");
    }
  }
}

namespace {

bool covers(const SceneObject& o, double px, double py, int frame) {
  const double shift = static_cast<double>(frame - 1);
  const double cx = o.center_x + shift * o.dx;
  const double cy = o.center_y + shift * o.dy;
  const double ux = px - cx;
  const double uy = py - cy;
  if (o.shape == ShapeKind::kDisk) return ux * ux + uy * uy <= o.half_width * o.half_width;
  return std::abs(ux) <= o.half_width && std::abs(uy) <= o.half_height;
}

Array<float> background_radiance(const SceneSpec& spec) {
  const BackgroundSpec& b = spec.background;
  Array<float> out(Shape{1, 3, spec.height, spec.width});
  const double log_lo = std::log(b.radiance_min);
  const double log_hi = std::log(b.radiance_max);
  for (std::size_t y = 0; y < spec.height; ++y) {
    for (std::size_t x = 0; x < spec.width; ++x) {
      const double u = (static_cast<double>(x) + 0.5) / static_cast<double>(spec.width);
      const double v = (static_cast<double>(y) + 0.5) / static_cast<double>(spec.height);
      double s = b.offset;
      for (const GradientTerm& g : b.gradients) {
        s += g.weight * ((u - 0.5) * std::cos(g.angle) + (v - 0.5) * std::sin(g.angle));
      }
      for (const WaveTerm& w : b.waves) {
        s += w.weight * std::sin(2.0 * std::numbers::pi * (w.fx * u + w.fy * v) + w.phase);
      }
      s = std::clamp(s, 0.0, 1.0);
      const double radiance = std::exp(log_lo + s * (log_hi - log_lo));
      for (std::size_t c = 0; c < 3; ++c) {
        out.at(0, c, y, x) = static_cast<float>(std::clamp(radiance * b.tint[c], 0.0, 1.0));
      }
    }
  }
  return out;
}

}  // namespace

std::array<HdrImage, 3> gen_scene(const SceneSpec& spec) {
  spec.validate();
  const Array<float> background = background_radiance(spec);
  std::array<HdrImage, 3> frames;
  for (int f = 0; f < 3; ++f) {
    Array<float> img = background;
    for (const SceneObject& o : spec.objects) {
      for (std::size_t y = 0; y < spec.height; ++y) {
        for (std::size_t x = 0; x < spec.width; ++x) {
          if (!covers(o, static_cast<double>(x), static_cast<double>(y), f)) continue;
          for (std::size_t c = 0; c < 3; ++c) img.at(0, c, y, x) = static_cast<float>(o.radiance[c]);
        }
      }
    }
    frames[static_cast<std::size_t>(f)] = HdrImage{std::move(img)};
  }
  return frames;
}

Array<float> motion_mask(const SceneSpec& spec) {
  Array<float> mask(Shape{1, 1, spec.height, spec.width});
  for (const SceneObject& o : spec.objects) {
    if (o.dx == 0.0 && o.dy == 0.0) continue;
    for (std::size_t y = 0; y < spec.height; ++y)
      for (std::size_t x = 0; x < spec.width; ++x)
        for (int f = 0; f < 3; ++f)
          if (covers(o, static_cast<double>(x), static_cast<double>(y), f)) mask.at(0, 0, y, x) = 1.0f;
  }
  return mask;
}

ExposureImage render_ldr(const HdrImage& h, int bias, const GammaParams& g, int quantize_bits, double noise_sigma,
                         Rng* noise) {
  g.validate();
  if (quantize_bits < 0 || quantize_bits > 16) throw ConfigError("quantize_bits must be in [0, 16]");
  const double t = std::ldexp(1.0, bias);
  const double inv_gamma = 1.0 / g.gamma;
  const double levels = quantize_bits > 0 ? std::ldexp(1.0, quantize_bits) - 1.0 : 0.0;
  Array<float> ldr(h.radiance.shape());
  for (std::size_t i = 0; i < ldr.size(); ++i) {
    double v = std::pow(std::max(0.0, static_cast<double>(h.radiance[i]) * t), inv_gamma);
    if (noise != nullptr && noise_sigma > 0.0) v += noise_sigma * noise->normal();
    v = std::clamp(v, 0.0, 1.0);
    if (levels > 0.0) v = std::round(v * levels) / levels;
    ldr[i] = static_cast<float>(v);
  }
  return ExposureImage::from_bias(std::move(ldr), bias);
}

SceneSpec random_scene(const SynthOptions& opts, std::uint64_t seed) {
  if (opts.width < 8 || opts.height < 8) throw ConfigError("random_scene: canvas must be at least 8x8");
  if (opts.min_objects == 0 || opts.max_objects < opts.min_objects) {
    throw ConfigError("random_scene: need 1 <= min_objects <= max_objects");
  }
  Rng rng(seed);
  SceneSpec spec;
  spec.width = opts.width;
  spec.height = opts.height;
  spec.seed = seed;
  const double w = static_cast<double>(opts.width);
  const double h = static_cast<double>(opts.height);

  BackgroundSpec& bg = spec.background;
  bg.radiance_min = std::exp(rng.uniform(std::log(0.001), std::log(0.01)));
  bg.radiance_max = std::exp(rng.uniform(std::log(0.1), std::log(0.8)));
  bg.offset = rng.uniform(0.3, 0.7);
  for (int i = 0; i < 2; ++i) {
    bg.gradients.push_back({rng.uniform(0.0, 2.0 * std::numbers::pi), rng.uniform(0.3, 1.0)});
  }
  for (int i = 0; i < 2; ++i) {
    bg.waves.push_back({rng.uniform(0.5, 3.0), rng.uniform(0.5, 3.0), rng.uniform(0.0, 2.0 * std::numbers::pi),
                        rng.uniform(0.05, 0.25)});
  }
  for (double& t : bg.tint) t = rng.uniform(0.7, 1.0);

  const std::size_t count = opts.min_objects + rng.index(opts.max_objects - opts.min_objects + 1);
  const double max_half = std::max(2.0, std::min(w, h) / 6.0);
  for (std::size_t i = 0; i < count; ++i) {
    SceneObject o;
    o.shape = rng.uniform() < 0.5 ? ShapeKind::kDisk : ShapeKind::kRectangle;
    o.half_width = rng.uniform(2.0, max_half);
    o.half_height = o.shape == ShapeKind::kDisk ? o.half_width : rng.uniform(2.0, max_half);
    o.center_x = rng.uniform(o.half_width, w - o.half_width);
    o.center_y = rng.uniform(o.half_height, h - o.half_height);
    // Alternate bright (saturating under +2 stops) and dark objects.
    const bool bright = i % 2 == 0;
    const double level = bright ? rng.uniform(0.35, 1.0) : std::exp(rng.uniform(std::log(0.002), std::log(0.05)));
    for (double& r : o.radiance) r = std::clamp(level * rng.uniform(0.75, 1.0), 0.0, 1.0);
    // Integer displacements keep object masks exact translates.
    const bool moving = i == 0 || rng.uniform() < 0.6;
    if (moving) {
      const double lo = std::max(0.0, opts.min_motion_px);
      const double hi = std::max(lo, opts.max_motion_px);
      const double magnitude = std::round(rng.uniform(lo, hi));
      const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
      o.dx = std::round(magnitude * std::cos(angle));
      o.dy = std::round(magnitude * std::sin(angle));
      if (std::hypot(o.dx, o.dy) < lo) o.dx = o.dx >= 0.0 ? std::ceil(lo) : -std::ceil(lo);
    }
    spec.objects.push_back(o);
  }
  if (opts.force_saturation) {
    SceneObject& first = spec.objects.front();
    for (double& r : first.radiance) r = std::max(r, 0.5);
  }
  return spec;
}

SampleTriplet make_sample(const SceneSpec& spec, const SynthOptions& opts) {
  std::array<int, 3> biases = opts.biases;
  std::sort(biases.begin(), biases.end());
  std::array<HdrImage, 3> frames = gen_scene(spec);
  const GammaParams g{opts.gamma};
  Rng noise(derive_seed(spec.seed, {0x6e6f697365ULL}));
  SampleTriplet s;
  for (std::size_t f = 0; f < 3; ++f) {
    s.ldrs[f] = render_ldr(frames[f], biases[f], g, opts.quantize_bits, opts.noise_sigma, &noise);
  }
  s.gt = std::move(frames[1]);
  s.scene = spec;
  return s;
}

std::vector<SampleTriplet> generate_samples(std::size_t n, std::uint64_t base_seed, const SynthOptions& opts) {
  std::vector<SampleTriplet> out(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const std::uint64_t seed = derive_seed(base_seed, {static_cast<std::uint64_t>(i)});
    SampleTriplet s = make_sample(random_scene(opts, seed), opts);
    s.id = sample_id(static_cast<std::size_t>(i));
    out[static_cast<std::size_t>(i)] = std::move(s);
  }
  return out;
}

void dataset_generate(std::size_t n, std::uint64_t base_seed, const std::filesystem::path& out_dir,
                      const SynthOptions& opts) {
  const std::vector<SampleTriplet> samples = generate_samples(n, base_seed, opts);
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < n; ++i) seeds.push_back(derive_seed(base_seed, {i}));
  const int bits = opts.quantize_bits == 0 ? 16 : (opts.quantize_bits > 8 ? 16 : 8);
  write_dataset(out_dir, samples, seeds, bits);
}

}  // namespace ahdr
