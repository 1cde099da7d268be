// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ahdr/checkpoint.hpp"
#include "ahdr/data_synth.hpp"
#include "ahdr/hdr_domain.hpp"
#include "ahdr/network.hpp"
#include "ahdr/train_config.hpp"

namespace ahdr {

/// mean |T(clamp(pred)) - T(clamp(gt))| with T the mu-law curve.
template <typename T>
Tensor<T> loss_l1(Tape<T>& tape, const Tensor<T>& pred, const Tensor<T>& gt, const TonemapParams& tm = {});

/// mean (T(clamp(pred)) - T(clamp(gt)))^2.
template <typename T>
Tensor<T> loss_l2(Tape<T>& tape, const Tensor<T>& pred, const Tensor<T>& gt, const TonemapParams& tm = {});

template <typename T>
Tensor<T> compute_loss(LossKind kind, Tape<T>& tape, const Tensor<T>& pred, const Tensor<T>& gt,
                       const TonemapParams& tm = {});

/// One bias-corrected Adam update over `params` using their current
/// gradients (absent gradients count as zero). Moments are created on the
/// first call. Throws NumericError naming a parameter with a non-finite
/// gradient, before anything is modified.
void adam_step(const std::vector<NamedTensor<float>>& params, AdamState& state, const TrainConfig& cfg);

/// Same spatial window of all three LDRs and the ground truth.
SampleTriplet crop(const SampleTriplet& s, std::size_t top, std::size_t left, std::size_t height, std::size_t width);

/// Random size x size window shared by all four images.
SampleTriplet sample_patch(const SampleTriplet& s, std::size_t size, Rng& rng);

/// Dihedral transform k in [0, 8): (k & 3) quarter turns counter-clockwise,
/// preceded by a horizontal flip when k & 4. Odd turns need square images.
template <typename T>
Array<T> apply_dihedral(const Array<T>& a, int k);

SampleTriplet apply_dihedral(const SampleTriplet& s, int k);

/// Applies one random dihedral transform to every image of the sample.
/// Non-square samples draw only from the shape-preserving half.
SampleTriplet augment(const SampleTriplet& s, Rng& rng);

struct TrainRecord {
  std::size_t iteration = 0;
  double loss = 0.0;
  double wall_seconds = 0.0;
  std::optional<double> psnr_mu;
  std::optional<double> psnr_l;

  /// One JSON object per line.
  std::string to_line() const;
};

/// Stacked network inputs and targets for one iteration.
struct Batch {
  std::array<Array<float>, 3> inputs;  // (B, 6, P, P) each
  Array<float> target;                 // (B, 3, P, P)
};

/// Owns parameters and optimizer state for one training run.
///
/// Iteration i draws batch slot b from its own RNG stream keyed by
/// (seed, i, b), so a run resumed from a checkpoint replays exactly what the
/// unbroken run would have done.
class Trainer {
 public:
  Trainer(const NetConfig& net, const TrainConfig& train, std::vector<SampleTriplet> data);
  Trainer(const Checkpoint& resume, std::vector<SampleTriplet> data);

  /// Runs one iteration and returns its loss. Throws NumericError on a
  /// non-finite loss or gradient, leaving parameters at their last good values.
  double step();

  /// Runs until `iteration() == until`. Records are emitted every
  /// log_every iterations and at the end; checkpoints every checkpoint_every.
  void run(std::size_t until, const std::function<void(const TrainRecord&)>& on_record = {},
           const std::function<void(const Checkpoint&)>& on_checkpoint = {});

  Batch make_batch(std::size_t iteration) const;
  Checkpoint checkpoint() const;

  std::size_t iteration() const { return iteration_; }
  const NetConfig& net_config() const { return net_; }
  const TrainConfig& train_config() const { return train_; }
  const NetworkParams<float>& params() const { return params_; }

 private:
  void check_data() const;

  NetConfig net_;
  TrainConfig train_;
  std::vector<SampleTriplet> data_;
  NetworkParams<float> params_;
  AdamState adam_;
  std::size_t iteration_ = 0;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

/// Fresh training run of train.max_iterations iterations.
Checkpoint train(std::vector<SampleTriplet> data, const NetConfig& net, const TrainConfig& train,
                 const std::function<void(const TrainRecord&)>& on_record = {},
                 const std::function<void(const Checkpoint&)>& on_checkpoint = {});

}  // namespace ahdr
