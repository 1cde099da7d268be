// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#include "ahdr/training.hpp"

#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

namespace ahdr {

std::string_view loss_name(LossKind k) { return k == LossKind::kL1 ? "l1" : "l2"; }

LossKind parse_loss(std::string_view name) {
  if (name == "l1") return LossKind::kL1;
  if (name == "l2") return LossKind::kL2;
  throw ConfigError("unknown loss '" + std::string(name) + "' (expected l1 or l2)");
}

void TrainConfig::validate() const {
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning_rate must be >= 0");
  if (patch_size == 0) throw ConfigError("patch_size must be positive");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw ConfigError("adam betas must be in [0, 1)");
  }
  if (!(adam_eps > 0.0)) throw ConfigError("adam_eps must be positive");
  if (!(mu > 0.0)) throw ConfigError("mu must be positive");
  if (!(gamma > 1.0)) throw ConfigError("gamma must be > 1");
}

namespace {

template <typename T>
Tensor<T> tonemapped(Tape<T>& tape, const Tensor<T>& h, const TonemapParams& tm) {
  return mu_law_tonemap(tape, clamp(tape, h, T{0}, T{1}), tm);
}

}  // namespace

template <typename T>
Tensor<T> loss_l1(Tape<T>& tape, const Tensor<T>& pred, const Tensor<T>& gt, const TonemapParams& tm) {
  require_same_shape(pred.shape(), gt.shape(), "loss_l1");
  return mean(tape, abs(tape, sub(tape, tonemapped(tape, pred, tm), tonemapped(tape, gt, tm))));
}

template <typename T>
Tensor<T> loss_l2(Tape<T>& tape, const Tensor<T>& pred, const Tensor<T>& gt, const TonemapParams& tm) {
  require_same_shape(pred.shape(), gt.shape(), "loss_l2");
  return mean(tape, square(tape, sub(tape, tonemapped(tape, pred, tm), tonemapped(tape, gt, tm))));
}

template <typename T>
Tensor<T> compute_loss(LossKind kind, Tape<T>& tape, const Tensor<T>& pred, const Tensor<T>& gt,
                       const TonemapParams& tm) {
  return kind == LossKind::kL1 ? loss_l1(tape, pred, gt, tm) : loss_l2(tape, pred, gt, tm);
}

template Tensor<float> loss_l1<float>(Tape<float>&, const Tensor<float>&, const Tensor<float>&, const TonemapParams&);
template Tensor<double> loss_l1<double>(Tape<double>&, const Tensor<double>&, const Tensor<double>&,
                                        const TonemapParams&);
template Tensor<float> loss_l2<float>(Tape<float>&, const Tensor<float>&, const Tensor<float>&, const TonemapParams&);
template Tensor<double> loss_l2<double>(Tape<double>&, const Tensor<double>&, const Tensor<double>&,
                                        const TonemapParams&);
template Tensor<float> compute_loss<float>(LossKind, Tape<float>&, const Tensor<float>&, const Tensor<float>&,
                                           const TonemapParams&);
template Tensor<double> compute_loss<double>(LossKind, Tape<double>&, const Tensor<double>&, const Tensor<double>&,
                                             const TonemapParams&);

void adam_step(const std::vector<NamedTensor<float>>& params, AdamState& state, const TrainConfig& cfg) {
  if (state.slots.empty()) {
    for (const auto& p : params) state.slots.push_back({p.name, Array<float>(p.tensor.shape()), Array<float>(p.tensor.shape())});
  }
  if (state.slots.size() != params.size()) throw ConfigError("adam: optimizer state does not match parameters");
  for (std::size_t i = 0; i < params.size(); ++i) {
    const AdamSlot& slot = state.slots[i];
    if (slot.name != params[i].name || slot.m.shape() != params[i].tensor.shape()) {
      throw ConfigError("adam: optimizer slot '" + slot.name + "' does not match parameter '" + params[i].name + "'");
    }
    if (params[i].tensor.has_grad() && !all_finite(params[i].tensor.grad())) {
      throw NumericError("non-finite gradient in parameter " + params[i].name);
    }
  }
  state.step += 1;
  const double b1 = cfg.adam_beta1;
  const double b2 = cfg.adam_beta2;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(b1, t);
  const double correction2 = 1.0 - std::pow(b2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor<float> tensor = params[i].tensor;
    AdamSlot& slot = state.slots[i];
    Array<float>& value = tensor.mutable_value();
    const float* grad = tensor.has_grad() ? tensor.grad().data() : nullptr;
    for (std::size_t j = 0; j < value.size(); ++j) {
      const double g = grad != nullptr ? static_cast<double>(grad[j]) : 0.0;
      const double m = b1 * static_cast<double>(slot.m[j]) + (1.0 - b1) * g;
      const double v = b2 * static_cast<double>(slot.v[j]) + (1.0 - b2) * g * g;
      slot.m[j] = static_cast<float>(m);
      slot.v[j] = static_cast<float>(v);
      const double update = cfg.learning_rate * (m / correction1) / (std::sqrt(v / correction2) + cfg.adam_eps);
      value[j] = static_cast<float>(static_cast<double>(value[j]) - update);
    }
  }
}

namespace {

Array<float> crop_array(const Array<float>& a, std::size_t top, std::size_t left, std::size_t height,
                        std::size_t width) {
  const Shape& s = a.shape();
  if (top + height > s.h || left + width > s.w) {
    throw DimensionError(top + height > s.h ? "height" : "width",
                         "crop window exceeds image " + s.str());
  }
  Array<float> out(Shape{s.n, s.c, height, width});
  for (std::size_t n = 0; n < s.n; ++n)
    for (std::size_t c = 0; c < s.c; ++c)
      for (std::size_t y = 0; y < height; ++y)
        for (std::size_t x = 0; x < width; ++x) out.at(n, c, y, x) = a.at(n, c, top + y, left + x);
  return out;
}

}  // namespace

SampleTriplet crop(const SampleTriplet& s, std::size_t top, std::size_t left, std::size_t height, std::size_t width) {
  SampleTriplet out;
  out.id = s.id;
  for (std::size_t f = 0; f < 3; ++f) {
    out.ldrs[f] = s.ldrs[f];
    out.ldrs[f].ldr = crop_array(s.ldrs[f].ldr, top, left, height, width);
  }
  out.gt.radiance = crop_array(s.gt.radiance, top, left, height, width);
  return out;
}

SampleTriplet sample_patch(const SampleTriplet& s, std::size_t size, Rng& rng) {
  const Shape& shape = s.gt.radiance.shape();
  if (size > shape.h || size > shape.w) {
    throw DimensionError(size > shape.h ? "height" : "width",
                         "patch size " + std::to_string(size) + " exceeds image " + shape.str());
  }
  const std::size_t top = rng.index(shape.h - size + 1);
  const std::size_t left = rng.index(shape.w - size + 1);
  return crop(s, top, left, size, size);
}

template <typename T>
Array<T> apply_dihedral(const Array<T>& a, int k) {
  if (k < 0 || k > 7) throw ConfigError("dihedral index must be in [0, 8)");
  const Shape& s = a.shape();
  const int turns = k & 3;
  const bool flip = (k & 4) != 0;
  if ((turns & 1) && s.h != s.w) throw DimensionError("width", "quarter turns need a square image, got " + s.str());
  Array<T> out(s);
  for (std::size_t n = 0; n < s.n; ++n)
    for (std::size_t c = 0; c < s.c; ++c)
      for (std::size_t y = 0; y < s.h; ++y)
        for (std::size_t x0 = 0; x0 < s.w; ++x0) {
          const std::size_t x = flip ? s.w - 1 - x0 : x0;
          std::size_t oy = y, ox = x;
          switch (turns) {
            case 1: oy = s.w - 1 - x; ox = y; break;
            case 2: oy = s.h - 1 - y; ox = s.w - 1 - x; break;
            case 3: oy = x; ox = s.h - 1 - y; break;
            default: break;
          }
          out.at(n, c, oy, ox) = a.at(n, c, y, x0);
        }
  return out;
}

template Array<float> apply_dihedral<float>(const Array<float>&, int);
template Array<double> apply_dihedral<double>(const Array<double>&, int);

SampleTriplet apply_dihedral(const SampleTriplet& s, int k) {
  SampleTriplet out;
  out.id = s.id;
  for (std::size_t f = 0; f < 3; ++f) {
    out.ldrs[f] = s.ldrs[f];
    out.ldrs[f].ldr = apply_dihedral(s.ldrs[f].ldr, k);
  }
  out.gt.radiance = apply_dihedral(s.gt.radiance, k);
  return out;
}

SampleTriplet augment(const SampleTriplet& s, Rng& rng) {
  const Shape& shape = s.gt.radiance.shape();
  int k = static_cast<int>(rng.index(8));
  if (shape.h != shape.w) k &= ~1;  // keep only even turns
  return apply_dihedral(s, k);
}

std::string TrainRecord::to_line() const {
  nlohmann::json j{{"iteration", iteration}, {"loss", loss}, {"time", wall_seconds}};
  if (psnr_mu) j["psnr_mu"] = *psnr_mu;
  if (psnr_l) j["psnr_l"] = *psnr_l;
  return j.dump();
}

Trainer::Trainer(const NetConfig& net, const TrainConfig& train, std::vector<SampleTriplet> data)
    : net_(net), train_(train), data_(std::move(data)) {
  net_.validate();
  train_.validate();
  check_data();
  params_ = build_variant<float>(net_, train_.seed);
}

Trainer::Trainer(const Checkpoint& resume, std::vector<SampleTriplet> data)
    : net_(resume.net), train_(resume.train), data_(std::move(data)) {
  net_.validate();
  train_.validate();
  check_data();
  params_ = restore_params(resume.tensors, net_);
  adam_ = resume.adam;
  iteration_ = resume.iteration;
}

void Trainer::check_data() const {
  if (data_.empty()) throw ConfigError("training needs a non-empty dataset");
  for (const SampleTriplet& s : data_) {
    const Shape& shape = s.gt.radiance.shape();
    if (train_.patch_size > shape.h || train_.patch_size > shape.w) {
      throw ConfigError("patch size " + std::to_string(train_.patch_size) + " exceeds sample " + s.id + " " +
                        shape.str());
    }
  }
}

Batch Trainer::make_batch(std::size_t iteration) const {
  const GammaParams g{train_.gamma};
  std::array<std::vector<Array<float>>, 3> inputs;
  std::vector<Array<float>> targets;
  for (std::size_t b = 0; b < train_.batch_size; ++b) {
    Rng rng(derive_seed(train_.seed, {iteration, b}));
    const SampleTriplet& source = data_[rng.index(data_.size())];
    SampleTriplet patch = sample_patch(source, train_.patch_size, rng);
    if (train_.augment) patch = augment(patch, rng);
    for (std::size_t f = 0; f < 3; ++f) inputs[f].push_back(build_input(patch.ldrs[f], g));
    targets.push_back(clamp_values(patch.gt.radiance));
  }
  Batch batch;
  for (std::size_t f = 0; f < 3; ++f) batch.inputs[f] = batch_stack<float>(inputs[f]);
  batch.target = batch_stack<float>(targets);
  return batch;
}

double Trainer::step() {
  const Batch batch = make_batch(iteration_);
  const auto named = params_.named();
  for (auto& p : named) {
    Tensor<float> t = p.tensor;
    t.zero_grad();
  }
  Tape<float> tape;
  const Tensor<float> x1(batch.inputs[0]), x2(batch.inputs[1]), x3(batch.inputs[2]);
  const ForwardResult<float> out = ahdr_forward(tape, x1, x2, x3, params_, net_);
  const Tensor<float> target(batch.target);
  const Tensor<float> loss = compute_loss(train_.loss, tape, out.hdr, target, TonemapParams{train_.mu});
  const double value = static_cast<double>(item(loss));
  if (!std::isfinite(value)) {
    throw NumericError("non-finite loss at iteration " + std::to_string(iteration_ + 1));
  }
  tape.backward(loss);
  adam_step(named, adam_, train_);
  ++iteration_;
  return value;
}

void Trainer::run(std::size_t until, const std::function<void(const TrainRecord&)>& on_record,
                  const std::function<void(const Checkpoint&)>& on_checkpoint) {
  while (iteration_ < until) {
    const double loss = step();
    const bool last = iteration_ == until;
    if (on_record && (last || iteration_ == 1 || (train_.log_every > 0 && iteration_ % train_.log_every == 0))) {
      TrainRecord r;
      r.iteration = iteration_;
      r.loss = loss;
      r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
      on_record(r);
    }
    if (on_checkpoint && train_.checkpoint_every > 0 && iteration_ % train_.checkpoint_every == 0) {
      on_checkpoint(checkpoint());
    }
  }
}

Checkpoint Trainer::checkpoint() const {
  Checkpoint c;
  c.net = net_;
  c.train = train_;
  c.iteration = iteration_;
  c.tensors = snapshot_params(params_);
  c.adam = adam_;
  return c;
}

Checkpoint train(std::vector<SampleTriplet> data, const NetConfig& net, const TrainConfig& cfg,
                 const std::function<void(const TrainRecord&)>& on_record,
                 const std::function<void(const Checkpoint&)>& on_checkpoint) {
  Trainer trainer(net, cfg, std::move(data));
  trainer.run(cfg.max_iterations, on_record, on_checkpoint);
  return trainer.checkpoint();
}

}  // namespace ahdr
