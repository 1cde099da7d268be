// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#include "ahdr/tensor.hpp"

#include <stdexcept>

namespace ahdr {

template <typename T>
Tensor<T> Tape<T>::record(Array<T> value, std::initializer_list<const Tensor<T>*> inputs, BackwardFn backward) {
  return record(std::move(value), std::vector<const Tensor<T>*>(inputs), std::move(backward));
}

template <typename T>
Tensor<T> Tape<T>::record(Array<T> value, const std::vector<const Tensor<T>*>& inputs, BackwardFn backward) {
  Tensor<T> out(std::move(value), false);
  out.node_->leaf = false;
  if (!recording_) return out;
  bool needs_grad = false;
  for (const Tensor<T>* in : inputs) needs_grad = needs_grad || in->requires_grad();
  if (!needs_grad) return out;
  if (consumed_) throw std::logic_error("recording on a tape that already ran backward; call reset() first");
  out.node_->requires_grad = true;
  out.node_->backward = std::move(backward);
  out.node_->tape = this;
  nodes_.push_back(out.node_);
  return out;
}

template <typename T>
void Tape<T>::backward(const Tensor<T>& loss) {
  if (!loss.defined() || loss.shape().numel() != 1) {
    throw DimensionError("numel", "backward() needs a scalar loss, got shape " +
                                      (loss.defined() ? loss.shape().str() : std::string("<undefined>")));
  }
  if (consumed_) throw std::logic_error("backward() called twice without reset()");
  if (!loss.requires_grad() || loss.node()->tape != this) {
    throw std::logic_error("backward(): loss was not produced by differentiable ops on this tape");
  }
  consumed_ = true;
  loss.node_->grad = Array<T>(loss.shape(), T{1});
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    detail::Node<T>& node = **it;
    if (node.grad.empty() || !node.backward) continue;
    node.backward(node.value, node.grad);
  }
}

template <typename T>
void Tape<T>::reset() {
  nodes_.clear();
  consumed_ = false;
}

template class Tape<float>;
template class Tape<double>;

}  // namespace ahdr
