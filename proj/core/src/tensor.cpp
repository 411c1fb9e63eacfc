#include "c2f/numerics/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "c2f/errors.hpp"

namespace c2f::numerics {

std::size_t element_count(const Shape& shape) {
  std::size_t n = 1;
  for (const auto extent : shape) {
    n *= extent;
  }
  return n;
}

std::string to_string(const Shape& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) {
      out += "x";
    }
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

Tensor::Tensor(Shape shape, float fill)
    : shape_(std::move(shape)), values_(element_count(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<float> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  if (values_.size() != element_count(shape_)) {
    throw DimensionError("tensor of shape " + to_string(shape_) + " given " +
                         std::to_string(values_.size()) + " values");
  }
}

Tensor Tensor::vector(std::vector<float> values) {
  const std::size_t n = values.size();
  return Tensor(Shape{n}, std::move(values));
}

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= shape_.size()) {
    throw DimensionError("axis " + std::to_string(axis) + " out of range for shape " +
                         to_string(shape_));
  }
  return shape_[axis];
}

float Tensor::item() const {
  if (values_.size() != 1) {
    throw ContractError("item() on tensor of shape " + to_string(shape_));
  }
  return values_[0];
}

void Tensor::track_grad(bool on) {
  tracked_ = on;
  if (on) {
    grad_.assign(values_.size(), 0.0f);
  } else {
    grad_.clear();
  }
}

void Tensor::zero_grad() {
  std::fill(grad_.begin(), grad_.end(), 0.0f);
}

bool Tensor::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](float v) { return std::isfinite(v); });
}

bool Tensor::identical(const Tensor& other) const noexcept {
  return shape_ == other.shape_ &&
         (values_.empty() ||
          std::memcmp(values_.data(), other.values_.data(), values_.size() * sizeof(float)) == 0);
}

}  // namespace c2f::numerics
