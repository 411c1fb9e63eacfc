#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "c2f/numerics/tensor.hpp"

namespace c2f::numerics {

// Handle to a value recorded on a Tape. Cheap to copy; only meaningful for
// the tape that produced it.
struct Var {
  static constexpr std::size_t kInvalid = std::numeric_limits<std::size_t>::max();
  std::size_t index = kInvalid;

  bool valid() const noexcept { return index != kInvalid; }
};

// Append-only record of primitive operations. Nodes are stored in creation
// order, which is a topological order, so backward() is one reverse sweep
// that visits every node once.
//
// Leaves come in three kinds:
//   constant  - no gradient
//   variable  - gradient kept on the tape, read back with grad()
//   parameter - references an external Tensor; backward() adds into its
//               grad() buffer, so several tapes can accumulate into one
//               parameter set.
class Tape {
 public:
  // Called during the reverse sweep for a node whose output requires grad.
  // It reads grad(out) and adds into the input gradients it owns.
  using BackwardFn = std::function<void(Tape& tape, Var out)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) = default;
  Tape& operator=(Tape&&) = default;

  Var constant(Tensor value);
  // Refers to `value` without copying; it must outlive the tape.
  Var constant_ref(const Tensor& value);
  Var variable(Tensor value);
  Var parameter(Tensor& param);

  const Tensor& value(Var v) const;
  const Shape& shape(Var v) const { return value(v).shape(); }
  bool requires_grad(Var v) const;

  // Gradient of a variable or intermediate after backward(). Parameters
  // report through their own Tensor::grad().
  std::span<const float> grad(Var v) const;

  // Records an op output. `inputs` only feed requires_grad propagation; the
  // backward function captures whatever it needs.
  Var record(Tensor value, std::span<const Var> inputs, BackwardFn backward);
  Var record(Tensor value, std::initializer_list<Var> inputs, BackwardFn backward) {
    return record(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()),
                  std::move(backward));
  }

  // Mutable gradient buffer of a node, allocated zeroed on first use.
  // Only for op implementations.
  std::span<float> grad_buffer(Var v);

  // Reverse sweep from a scalar loss. A second call on the same tape throws;
  // build a new tape for a new step.
  void backward(Var loss, float seed = 1.0f);

  std::size_t size() const noexcept { return nodes_.size(); }
  bool backward_done() const noexcept { return backward_done_; }

 private:
  struct Node {
    Tensor storage;
    const Tensor* external_value = nullptr;
    Tensor* param = nullptr;
    std::vector<float> grad;
    BackwardFn backward;
    bool requires_grad = false;
  };

  const Node& node(Var v) const;
  Node& node(Var v);

  std::vector<Node> nodes_;
  bool backward_done_ = false;
};

}  // namespace c2f::numerics
