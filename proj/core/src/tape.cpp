#include "c2f/numerics/tape.hpp"

#include <cmath>

#include "c2f/errors.hpp"

namespace c2f::numerics {

const Tape::Node& Tape::node(Var v) const {
  if (!v.valid() || v.index >= nodes_.size()) {
    throw ContractError("variable does not belong to this tape");
  }
  return nodes_[v.index];
}

Tape::Node& Tape::node(Var v) {
  if (!v.valid() || v.index >= nodes_.size()) {
    throw ContractError("variable does not belong to this tape");
  }
  return nodes_[v.index];
}

Var Tape::constant(Tensor value) {
  Node n;
  n.storage = std::move(value);
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

Var Tape::constant_ref(const Tensor& value) {
  Node n;
  n.external_value = &value;
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

Var Tape::variable(Tensor value) {
  Node n;
  n.storage = std::move(value);
  n.requires_grad = true;
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

Var Tape::parameter(Tensor& param) {
  if (!param.tracks_grad()) {
    param.track_grad();
  }
  Node n;
  n.external_value = &param;
  n.param = &param;
  n.requires_grad = true;
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

const Tensor& Tape::value(Var v) const {
  const Node& n = node(v);
  return n.external_value != nullptr ? *n.external_value : n.storage;
}

bool Tape::requires_grad(Var v) const {
  return node(v).requires_grad;
}

std::span<const float> Tape::grad(Var v) const {
  const Node& n = node(v);
  if (n.param != nullptr) {
    return n.param->grad();
  }
  return n.grad;
}

Var Tape::record(Tensor value, std::span<const Var> inputs, BackwardFn backward) {
  bool needs = false;
  for (const Var in : inputs) {
    needs = needs || node(in).requires_grad;
  }
  Node n;
  n.storage = std::move(value);
  n.requires_grad = needs;
  if (needs) {
    n.backward = std::move(backward);
  }
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

std::span<float> Tape::grad_buffer(Var v) {
  Node& n = node(v);
  if (n.param != nullptr) {
    return n.param->grad();
  }
  if (n.grad.empty()) {
    n.grad.assign(value(v).size(), 0.0f);
  }
  return n.grad;
}

void Tape::backward(Var loss, float seed) {
  if (backward_done_) {
    throw ContractError("backward() already ran on this tape; gradients were not reset");
  }
  const Tensor& lv = value(loss);
  if (lv.size() != 1) {
    throw ContractError("backward() needs a scalar loss, got shape " + to_string(lv.shape()));
  }
  if (!std::isfinite(lv[0])) {
    throw NonFiniteError("backward() on a non-finite loss");
  }
  backward_done_ = true;
  if (!node(loss).requires_grad) {
    return;
  }
  grad_buffer(loss)[0] += seed;
  for (std::size_t i = loss.index + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad || !n.backward || n.grad.empty()) {
      continue;
    }
    n.backward(*this, Var{i});
  }
}

}  // namespace c2f::numerics
