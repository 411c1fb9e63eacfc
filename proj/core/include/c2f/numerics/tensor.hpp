#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace c2f::numerics {

using Shape = std::vector<std::size_t>;

std::size_t element_count(const Shape& shape);
std::string to_string(const Shape& shape);

// Dense row-major float32 array with an optional gradient buffer of the
// same shape. Rank 0 ({}), rank 1 and rank 2 cover everything the model
// needs; the conv kernel is rank 3.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, float fill = 0.0f);
  Tensor(Shape shape, std::vector<float> values);

  static Tensor scalar(float value) { return Tensor(Shape{}, std::vector<float>{value}); }
  static Tensor vector(std::vector<float> values);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  std::span<float> values() noexcept { return values_; }
  std::span<const float> values() const noexcept { return values_; }
  float* data() noexcept { return values_.data(); }
  const float* data() const noexcept { return values_.data(); }

  float& operator[](std::size_t i) { return values_[i]; }
  float operator[](std::size_t i) const { return values_[i]; }

  // Row-major access for rank-2 tensors.
  float& at(std::size_t row, std::size_t col) { return values_[row * shape_[1] + col]; }
  float at(std::size_t row, std::size_t col) const { return values_[row * shape_[1] + col]; }

  // The scalar value of a single-element tensor.
  float item() const;

  bool tracks_grad() const noexcept { return tracked_; }
  void track_grad(bool on = true);
  std::span<float> grad() noexcept { return grad_; }
  std::span<const float> grad() const noexcept { return grad_; }
  void zero_grad();

  bool all_finite() const noexcept;

  // Same shape and bit-identical values (gradients ignored).
  bool identical(const Tensor& other) const noexcept;

 private:
  Shape shape_;
  std::vector<float> values_;
  std::vector<float> grad_;
  bool tracked_ = false;
};

}  // namespace c2f::numerics
