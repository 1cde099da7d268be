// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ahdr/hdr_domain.hpp"
#include "ahdr/rng.hpp"

namespace ahdr {

/// Linear ramp along direction `angle` (radians) in normalized coordinates.
struct GradientTerm {
  double angle = 0.0;
  double weight = 0.0;
};

/// weight * sin(2 pi (fx u + fy v) + phase) with u, v in [0, 1).
struct WaveTerm {
  double fx = 1.0;
  double fy = 0.0;
  double phase = 0.0;
  double weight = 0.0;
};

/// Smooth static background. The gradient and wave terms sum to a field s
/// that is clamped to [0, 1] and mapped log-linearly onto
/// [radiance_min, radiance_max], then tinted per channel.
struct BackgroundSpec {
  double radiance_min = 0.002;
  double radiance_max = 0.6;
  double offset = 0.5;
  std::vector<GradientTerm> gradients;
  std::vector<WaveTerm> waves;
  std::array<double, 3> tint{1.0, 1.0, 1.0};
};

enum class ShapeKind { kDisk, kRectangle };

/// A rigid object translated by (f - 2) * displacement in frame f = 1, 2, 3.
/// Disks use half_width as radius; rectangles are axis aligned.
struct SceneObject {
  ShapeKind shape = ShapeKind::kDisk;
  std::array<double, 3> radiance{1.0, 1.0, 1.0};
  double center_x = 0.0;
  double center_y = 0.0;
  double half_width = 4.0;
  double half_height = 4.0;
  double dx = 0.0;
  double dy = 0.0;
};

struct SceneSpec {
  std::size_t width = 64;
  std::size_t height = 64;
  BackgroundSpec background;
  std::vector<SceneObject> objects;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Three LDR exposures sorted by exposure (ascending) plus ground truth
/// aligned with the middle frame.
struct SampleTriplet {
  std::array<ExposureImage, 3> ldrs;
  HdrImage gt;
  std::string id;
  std::optional<SceneSpec> scene;
};

/// Knobs for random scene generation.
struct SynthOptions {
  std::size_t width = 64;
  std::size_t height = 64;
  std::size_t min_objects = 2;
  std::size_t max_objects = 4;
  double min_motion_px = 3.0;
  double max_motion_px = 6.0;
  /// Guarantees content above 1/4 so the +2 exposure saturates somewhere.
  bool force_saturation = true;
  std::array<int, 3> biases{-2, 0, 2};
  double gamma = 2.2;
  int quantize_bits = 8;
  /// Stddev of additive Gaussian noise on LDR values before quantization.
  double noise_sigma = 0.0;
};

/// Random SceneSpec: at least one object moves by >= min_motion_px per frame.
SceneSpec random_scene(const SynthOptions& opts, std::uint64_t seed);

/// Three radiance frames in [0, 1]; frame index 1 (the middle) is the ground truth.
std::array<HdrImage, 3> gen_scene(const SceneSpec& spec);

/// Forward camera model: I = Q(clip((h * 2^bias)^(1/gamma), 0, 1)) with Q
/// rounding to 2^bits - 1 levels (bits = 0 disables quantization).
/// `noise` (if given) adds N(0, noise_sigma^2) before clipping.
ExposureImage render_ldr(const HdrImage& h, int bias, const GammaParams& g = {}, int quantize_bits = 8,
                         double noise_sigma = 0.0, Rng* noise = nullptr);

SampleTriplet make_sample(const SceneSpec& spec, const SynthOptions& opts = {});

/// Writes n samples plus a manifest under out_dir; byte-reproducible from
/// base_seed. Sample i uses seed derive_seed(base_seed, {i}).
void dataset_generate(std::size_t n, std::uint64_t base_seed, const std::filesystem::path& out_dir,
                      const SynthOptions& opts = {});

/// In-memory equivalent of dataset_generate.
std::vector<SampleTriplet> generate_samples(std::size_t n, std::uint64_t base_seed, const SynthOptions& opts = {});

/// Per-pixel mask (1, 1, H, W) of pixels covered by any object in any of the
/// three frames: the region where exposures disagree geometrically.
Array<float> motion_mask(const SceneSpec& spec);

}  // namespace ahdr
