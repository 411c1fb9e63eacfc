#include "c2f/numerics/adam.hpp"

#include <cmath>

#include "c2f/errors.hpp"

namespace c2f::numerics {

void AdamState::step(std::span<const NamedTensor> params) {
  for (const auto& p : params) {
    if (!p.tensor->tracks_grad()) {
      throw ContractError("adam: parameter '" + p.name + "' has no gradient buffer");
    }
    const auto g = p.tensor->grad();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!std::isfinite(g[i])) {
        throw NonFiniteError("adam: non-finite gradient in parameter '" + p.name + "' at element " +
                             std::to_string(i));
      }
    }
  }
  if (m_.empty()) {
    for (const auto& p : params) {
      m_.emplace_back(p.tensor->shape());
      v_.emplace_back(p.tensor->shape());
    }
  }
  if (m_.size() != params.size()) {
    throw DimensionError("adam: state holds " + std::to_string(m_.size()) + " parameters, got " +
                         std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (m_[i].shape() != params[i].tensor->shape()) {
      throw DimensionError("adam: parameter '" + params[i].name + "' changed shape to " +
                           to_string(params[i].tensor->shape()));
    }
  }

  ++steps_;
  const auto t = static_cast<double>(steps_);
  const float b1 = options_.beta1;
  const float b2 = options_.beta2;
  const auto c1 = static_cast<float>(1.0 - std::pow(static_cast<double>(b1), t));
  const auto c2 = static_cast<float>(1.0 - std::pow(static_cast<double>(b2), t));
  const float lr = options_.learning_rate;
  const float eps = options_.epsilon;

  for (std::size_t i = 0; i < params.size(); ++i) {
    auto w = params[i].tensor->values();
    const auto g = params[i].tensor->grad();
    auto m = m_[i].values();
    auto v = v_[i].values();
    for (std::size_t j = 0; j < w.size(); ++j) {
      m[j] = b1 * m[j] + (1.0f - b1) * g[j];
      v[j] = b2 * v[j] + (1.0f - b2) * g[j] * g[j];
      const float m_hat = m[j] / c1;
      const float v_hat = v[j] / c2;
      w[j] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
  }
}

}  // namespace c2f::numerics
