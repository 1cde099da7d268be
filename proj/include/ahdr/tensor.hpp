// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "ahdr/array.hpp"

namespace ahdr {

template <typename T>
class Tape;

namespace detail {

template <typename T>
struct Node {
  using BackwardFn = std::function<void(const Array<T>& value, const Array<T>& grad)>;

  Array<T> value;
  Array<T> grad;  // empty until the first gradient arrives
  bool requires_grad = false;
  bool leaf = true;
  BackwardFn backward;
  const Tape<T>* tape = nullptr;
};

}  // namespace detail

/// Shared handle to a value in the autodiff graph.
///
/// Leaves are created directly (parameters with `requires_grad`, inputs
/// without); interior tensors come out of the ops in ops.hpp. Copies share
/// the underlying node. Values are immutable except through
/// `mutable_value()` on leaves, which optimizers and loaders use.
template <typename T>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Array<T> value, bool requires_grad = false)
      : node_(std::make_shared<detail::Node<T>>()) {
    node_->value = std::move(value);
    node_->requires_grad = requires_grad;
  }

  static Tensor parameter(Array<T> value) { return Tensor(std::move(value), true); }

  bool defined() const { return node_ != nullptr; }
  const Array<T>& value() const { return node_->value; }
  const Shape& shape() const { return node_->value.shape(); }
  bool requires_grad() const { return node_->requires_grad; }
  bool is_leaf() const { return node_->leaf; }

  Array<T>& mutable_value() {
    if (!node_->leaf) throw std::logic_error("mutable_value() on a non-leaf tensor");
    return node_->value;
  }

  bool has_grad() const { return !node_->grad.empty(); }
  const Array<T>& grad() const {
    if (node_->grad.empty()) throw std::logic_error("tensor has no gradient");
    return node_->grad;
  }
  /// Gradient storage, zero-initialized on first access.
  Array<T>& grad_buffer() {
    if (node_->grad.empty()) node_->grad = Array<T>(shape());
    return node_->grad;
  }
  void zero_grad() { node_->grad = Array<T>(); }

  detail::Node<T>* node() const { return node_.get(); }
  friend bool operator==(const Tensor& a, const Tensor& b) { return a.node_ == b.node_; }

 private:
  friend class Tape<T>;
  std::shared_ptr<detail::Node<T>> node_;
};

/// Records differentiable ops in execution order and replays them backwards.
///
/// Creation order is a topological order, so a single reverse sweep visits
/// every node after all of its consumers. A non-recording tape is used for
/// inference: ops still compute values but keep no graph.
template <typename T>
class Tape {
 public:
  using BackwardFn = typename detail::Node<T>::BackwardFn;

  explicit Tape(bool recording = true) : recording_(recording) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const { return recording_; }
  std::size_t size() const { return nodes_.size(); }

  /// Wraps an op result. When recording and any input needs a gradient the
  /// result joins the graph with `backward` as its adjoint rule.
  Tensor<T> record(Array<T> value, std::initializer_list<const Tensor<T>*> inputs, BackwardFn backward);
  Tensor<T> record(Array<T> value, const std::vector<const Tensor<T>*>& inputs, BackwardFn backward);

  /// Populates dLoss/dLeaf on every grad-enabled leaf reachable from `loss`.
  /// Leaf gradients accumulate across calls until `zero_grad()`.
  void backward(const Tensor<T>& loss);

  /// Drops the recorded graph so the tape can be reused.
  void reset();

 private:
  bool recording_;
  bool consumed_ = false;
  std::vector<std::shared_ptr<detail::Node<T>>> nodes_;
};

extern template class Tape<float>;
extern template class Tape<double>;

}  // namespace ahdr
