#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "c2f/numerics/tensor.hpp"

namespace c2f::numerics {

struct AdamOptions {
  float learning_rate = 1e-4f;
  float beta1 = 0.9f;
  float beta2 = 0.999f;
  float epsilon = 1e-8f;
};

// A parameter tensor plus the name used in diagnostics.
struct NamedTensor {
  std::string name;
  Tensor* tensor = nullptr;
};

// Bias-corrected Adam. Moments are created lazily on the first step so the
// state always matches the parameter shapes it was first given.
class AdamState {
 public:
  AdamState() = default;
  explicit AdamState(AdamOptions options) : options_(options) {}

  // Applies one update from each parameter's grad(). Throws NonFiniteError
  // naming the first parameter whose gradient holds a NaN/Inf; nothing is
  // modified in that case.
  void step(std::span<const NamedTensor> params);

  std::uint64_t steps() const noexcept { return steps_; }
  const AdamOptions& options() const noexcept { return options_; }
  const std::vector<Tensor>& first_moments() const noexcept { return m_; }
  const std::vector<Tensor>& second_moments() const noexcept { return v_; }

 private:
  AdamOptions options_;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
  std::uint64_t steps_ = 0;
};

}  // namespace c2f::numerics
