#include "c2f/numerics/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "c2f/errors.hpp"
#include "c2f/numerics/kernels.hpp"

namespace c2f::numerics {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) {
    throw DimensionError(what);
  }
}

void check_mask(std::span<const float> mask, std::size_t frames, const char* op) {
  require(mask.size() == frames, std::string(op) + ": mask has " + std::to_string(mask.size()) +
                                     " entries for " + std::to_string(frames) + " frames");
}

std::vector<float> copy_mask(std::span<const float> mask) {
  return {mask.begin(), mask.end()};
}

// Row indices of the k largest valid entries of column `col` of a row-major
// [frames x stride] block, ordered by value descending then index ascending.
std::vector<std::size_t> select_topk(std::span<const float> values, std::size_t stride,
                                     std::size_t col, std::span<const float> mask, std::size_t k) {
  std::vector<std::size_t> valid;
  valid.reserve(mask.size());
  for (std::size_t t = 0; t < mask.size(); ++t) {
    if (mask[t] != 0.0f) {
      valid.push_back(t);
    }
  }
  if (valid.empty()) {
    throw ContractError("topk_mean: no valid entries");
  }
  const std::size_t take = std::min(k, valid.size());
  auto before = [&](std::size_t a, std::size_t b) {
    const float va = values[a * stride + col];
    const float vb = values[b * stride + col];
    return va > vb || (va == vb && a < b);
  };
  std::partial_sort(valid.begin(), valid.begin() + static_cast<std::ptrdiff_t>(take), valid.end(),
                    before);
  valid.resize(take);
  return valid;
}

float mean_of(std::span<const float> values, std::size_t stride, std::size_t col,
              const std::vector<std::size_t>& picked) {
  float acc = 0.0f;
  for (const auto t : picked) {
    acc += values[t * stride + col];
  }
  return acc / static_cast<float>(picked.size());
}

}  // namespace

Var conv1d_temporal(Tape& tape, Var input, Var kernel, Var bias) {
  const Tensor& x = tape.value(input);
  const Tensor& w = tape.value(kernel);
  const Tensor& b = tape.value(bias);
  require(x.rank() == 2, "conv1d_temporal: input must be [T x D], got " + to_string(x.shape()));
  require(w.rank() == 3, "conv1d_temporal: kernel must be [K x D x H], got " + to_string(w.shape()));
  const std::size_t frames = x.dim(0);
  const std::size_t depth = x.dim(1);
  const std::size_t width = w.dim(0);
  const std::size_t channels = w.dim(2);
  require(w.dim(1) == depth, "conv1d_temporal: input depth " + std::to_string(depth) +
                                 " does not match kernel depth " + std::to_string(w.dim(1)));
  require(width % 2 == 1, "conv1d_temporal: kernel width must be odd, got " + std::to_string(width));
  require(b.rank() == 1 && b.dim(0) == channels,
          "conv1d_temporal: bias must be [" + std::to_string(channels) + "], got " +
              to_string(b.shape()));

  Tensor out(Shape{frames, channels});
  kernels::conv1d(x.values(), w.values(), b.values(), out.values(), frames, depth, width, channels);

  return tape.record(std::move(out), {input, kernel, bias},
                     [=](Tape& tp, Var self) {
                       const auto g = tp.grad(self);
                       if (tp.requires_grad(input)) {
                         kernels::conv1d_input_grad(g, tp.value(kernel).values(),
                                                    tp.grad_buffer(input), frames, depth, width,
                                                    channels);
                       }
                       if (tp.requires_grad(kernel)) {
                         kernels::conv1d_kernel_grad(tp.value(input).values(), g,
                                                     tp.grad_buffer(kernel), frames, depth, width,
                                                     channels);
                       }
                       if (tp.requires_grad(bias)) {
                         kernels::accumulate_bias_grad(g, tp.grad_buffer(bias), frames, channels);
                       }
                     });
}

Var fully_connected(Tape& tape, Var input, Var weights, Var bias) {
  const Tensor& x = tape.value(input);
  const Tensor& w = tape.value(weights);
  const Tensor& b = tape.value(bias);
  require(x.rank() >= 1, "fully_connected: input must have rank >= 1");
  require(w.rank() == 2, "fully_connected: weights must be [Din x Dout], got " + to_string(w.shape()));
  const std::size_t din = w.dim(0);
  const std::size_t dout = w.dim(1);
  require(x.shape().back() == din, "fully_connected: input trailing extent " +
                                       std::to_string(x.shape().back()) +
                                       " does not match weights Din " + std::to_string(din));
  require(b.rank() == 1 && b.dim(0) == dout,
          "fully_connected: bias must be [" + std::to_string(dout) + "], got " + to_string(b.shape()));
  const std::size_t rows = x.size() / din;

  Shape out_shape = x.shape();
  out_shape.back() = dout;
  Tensor out(out_shape);
  kernels::affine(x.values(), w.values(), b.values(), out.values(), rows, din, dout);

  return tape.record(std::move(out), {input, weights, bias}, [=](Tape& tp, Var self) {
    const auto g = tp.grad(self);
    if (tp.requires_grad(input)) {
      kernels::accumulate_a_grad(g, tp.value(weights).values(), tp.grad_buffer(input), rows, din,
                                 dout);
    }
    if (tp.requires_grad(weights)) {
      kernels::accumulate_b_grad(tp.value(input).values(), g, tp.grad_buffer(weights), rows, din,
                                 dout);
    }
    if (tp.requires_grad(bias)) {
      kernels::accumulate_bias_grad(g, tp.grad_buffer(bias), rows, dout);
    }
  });
}

Var sigmoid(Tape& tape, Var x) {
  const Tensor& in = tape.value(x);
  Tensor out(in.shape());
  constexpr float lo = std::numeric_limits<float>::min();
  constexpr float hi = 1.0f - 0x1.0p-24f;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const float v = in[i];
    float s;
    if (v >= 0.0f) {
      s = 1.0f / (1.0f + std::exp(-v));
    } else {
      const float e = std::exp(v);
      s = e / (1.0f + e);
    }
    out[i] = std::clamp(s, lo, hi);
  }
  return tape.record(std::move(out), {x}, [=](Tape& tp, Var self) {
    const auto g = tp.grad(self);
    const Tensor& y = tp.value(self);
    auto dx = tp.grad_buffer(x);
    for (std::size_t i = 0; i < y.size(); ++i) {
      dx[i] += g[i] * y[i] * (1.0f - y[i]);
    }
  });
}

Var relu(Tape& tape, Var x) {
  const Tensor& in = tape.value(x);
  Tensor out(in.shape());
  for (std::size_t i = 0; i < in.size(); ++i) {
    out[i] = in[i] > 0.0f ? in[i] : 0.0f;
  }
  return tape.record(std::move(out), {x}, [=](Tape& tp, Var self) {
    const auto g = tp.grad(self);
    const Tensor& src = tp.value(x);
    auto dx = tp.grad_buffer(x);
    for (std::size_t i = 0; i < src.size(); ++i) {
      if (src[i] > 0.0f) {
        dx[i] += g[i];
      }
    }
  });
}

Var topk_mean(Tape& tape, Var scores, std::span<const float> mask, std::size_t k) {
  const Tensor& s = tape.value(scores);
  require(s.rank() == 1, "topk_mean: scores must be a vector, got " + to_string(s.shape()));
  check_mask(mask, s.dim(0), "topk_mean");
  if (k == 0) {
    throw ContractError("topk_mean: k must be positive");
  }
  auto picked = select_topk(s.values(), 1, 0, mask, k);
  Tensor out = Tensor::scalar(mean_of(s.values(), 1, 0, picked));
  return tape.record(std::move(out), {scores}, [scores, picked = std::move(picked)](Tape& tp, Var self) {
    const float g = tp.grad(self)[0] / static_cast<float>(picked.size());
    auto ds = tp.grad_buffer(scores);
    for (const auto t : picked) {
      ds[t] += g;
    }
  });
}

Var topk_mean_columns(Tape& tape, Var scores, std::span<const float> mask, std::size_t k) {
  const Tensor& s = tape.value(scores);
  require(s.rank() == 2, "topk_mean_columns: scores must be [T x C], got " + to_string(s.shape()));
  const std::size_t frames = s.dim(0);
  const std::size_t classes = s.dim(1);
  check_mask(mask, frames, "topk_mean_columns");
  if (k == 0) {
    throw ContractError("topk_mean: k must be positive");
  }
  std::vector<std::vector<std::size_t>> picked(classes);
  Tensor out(Shape{classes});
  for (std::size_t c = 0; c < classes; ++c) {
    picked[c] = select_topk(s.values(), classes, c, mask, k);
    out[c] = mean_of(s.values(), classes, c, picked[c]);
  }
  return tape.record(std::move(out), {scores},
                     [scores, classes, picked = std::move(picked)](Tape& tp, Var self) {
                       const auto g = tp.grad(self);
                       auto ds = tp.grad_buffer(scores);
                       for (std::size_t c = 0; c < classes; ++c) {
                         const float share = g[c] / static_cast<float>(picked[c].size());
                         for (const auto t : picked[c]) {
                           ds[t * classes + c] += share;
                         }
                       }
                     });
}

Var mask_rows(Tape& tape, Var x, std::span<const float> mask) {
  const Tensor& in = tape.value(x);
  require(in.rank() == 1 || in.rank() == 2,
          "mask_rows: expected [T] or [T x C], got " + to_string(in.shape()));
  const std::size_t frames = in.dim(0);
  const std::size_t width = in.rank() == 2 ? in.dim(1) : 1;
  check_mask(mask, frames, "mask_rows");
  Tensor out(in.shape());
  for (std::size_t t = 0; t < frames; ++t) {
    if (mask[t] == 0.0f) {
      continue;
    }
    for (std::size_t c = 0; c < width; ++c) {
      out[t * width + c] = in[t * width + c];
    }
  }
  return tape.record(std::move(out), {x},
                     [x, width, m = copy_mask(mask)](Tape& tp, Var self) {
                       const auto g = tp.grad(self);
                       auto dx = tp.grad_buffer(x);
                       for (std::size_t t = 0; t < m.size(); ++t) {
                         if (m[t] == 0.0f) {
                           continue;
                         }
                         for (std::size_t c = 0; c < width; ++c) {
                           dx[t * width + c] += g[t * width + c];
                         }
                       }
                     });
}

Var scale_rows(Tape& tape, Var matrix, Var column) {
  const Tensor& m = tape.value(matrix);
  const Tensor& v = tape.value(column);
  require(m.rank() == 2, "scale_rows: matrix must be [T x C], got " + to_string(m.shape()));
  require(v.rank() == 1 && v.dim(0) == m.dim(0), "scale_rows: column must be [" +
                                                     std::to_string(m.dim(0)) + "], got " +
                                                     to_string(v.shape()));
  const std::size_t frames = m.dim(0);
  const std::size_t width = m.dim(1);
  Tensor out(m.shape());
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t c = 0; c < width; ++c) {
      out[t * width + c] = v[t] * m[t * width + c];
    }
  }
  return tape.record(std::move(out), {matrix, column}, [=](Tape& tp, Var self) {
    const auto g = tp.grad(self);
    const Tensor& mv = tp.value(matrix);
    const Tensor& vv = tp.value(column);
    if (tp.requires_grad(matrix)) {
      auto dm = tp.grad_buffer(matrix);
      for (std::size_t t = 0; t < frames; ++t) {
        for (std::size_t c = 0; c < width; ++c) {
          dm[t * width + c] += g[t * width + c] * vv[t];
        }
      }
    }
    if (tp.requires_grad(column)) {
      auto dv = tp.grad_buffer(column);
      for (std::size_t t = 0; t < frames; ++t) {
        float acc = 0.0f;
        for (std::size_t c = 0; c < width; ++c) {
          acc += g[t * width + c] * mv[t * width + c];
        }
        dv[t] += acc;
      }
    }
  });
}

Var threshold(Tape& tape, Var x, float threshold) {
  const Tensor& in = tape.value(x);
  Tensor out(in.shape());
  for (std::size_t i = 0; i < in.size(); ++i) {
    out[i] = in[i] >= threshold ? in[i] : 0.0f;
  }
  return tape.record(std::move(out), {x}, [=](Tape& tp, Var self) {
    const auto g = tp.grad(self);
    const Tensor& src = tp.value(x);
    auto dx = tp.grad_buffer(x);
    for (std::size_t i = 0; i < src.size(); ++i) {
      if (src[i] >= threshold) {
        dx[i] += g[i];
      }
    }
  });
}

Var reshape(Tape& tape, Var x, Shape shape) {
  const Tensor& in = tape.value(x);
  require(element_count(shape) == in.size(),
          "reshape: cannot view " + to_string(in.shape()) + " as " + to_string(shape));
  Tensor out(std::move(shape), std::vector<float>(in.values().begin(), in.values().end()));
  return tape.record(std::move(out), {x}, [=](Tape& tp, Var self) {
    const auto g = tp.grad(self);
    auto dx = tp.grad_buffer(x);
    for (std::size_t i = 0; i < g.size(); ++i) {
      dx[i] += g[i];
    }
  });
}

Var masked_bce(Tape& tape, Var probs, std::span<const float> targets,
               std::span<const float> weights, float eps) {
  const Tensor& p = tape.value(probs);
  require(targets.size() == p.size() && weights.size() == p.size(),
          "masked_bce: targets/weights must match probabilities of shape " + to_string(p.shape()));
  const float lo = eps;
  const float hi = 1.0f - eps;
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (weights[i] <= 0.0f) {
      continue;
    }
    const double q = std::clamp(p[i], lo, hi);
    const double y = targets[i];
    acc -= y * std::log(q) + (1.0 - y) * std::log(1.0 - q);
    ++count;
  }
  const float value = count == 0 ? 0.0f : static_cast<float>(acc / static_cast<double>(count));
  std::vector<float> y(targets.begin(), targets.end());
  std::vector<float> w(weights.begin(), weights.end());
  return tape.record(Tensor::scalar(value), {probs},
                     [=, y = std::move(y), w = std::move(w)](Tape& tp, Var self) {
                       if (count == 0) {
                         return;
                       }
                       const float g = tp.grad(self)[0] / static_cast<float>(count);
                       const Tensor& pv = tp.value(probs);
                       auto dp = tp.grad_buffer(probs);
                       for (std::size_t i = 0; i < pv.size(); ++i) {
                         const float q = pv[i];
                         if (w[i] <= 0.0f || q < lo || q > hi) {
                           continue;
                         }
                         dp[i] += g * (q - y[i]) / (q * (1.0f - q));
                       }
                     });
}

Var masked_abs_mean(Tape& tape, Var x, std::span<const float> mask) {
  const Tensor& in = tape.value(x);
  require(in.rank() == 1, "masked_abs_mean: expected a vector, got " + to_string(in.shape()));
  check_mask(mask, in.dim(0), "masked_abs_mean");
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t t = 0; t < in.size(); ++t) {
    if (mask[t] != 0.0f) {
      acc += std::fabs(in[t]);
      ++count;
    }
  }
  const float value = count == 0 ? 0.0f : static_cast<float>(acc / static_cast<double>(count));
  return tape.record(Tensor::scalar(value), {x}, [x, count, m = copy_mask(mask)](Tape& tp, Var self) {
    if (count == 0) {
      return;
    }
    const float g = tp.grad(self)[0] / static_cast<float>(count);
    const Tensor& src = tp.value(x);
    auto dx = tp.grad_buffer(x);
    for (std::size_t t = 0; t < m.size(); ++t) {
      if (m[t] != 0.0f && src[t] != 0.0f) {
        dx[t] += src[t] > 0.0f ? g : -g;
      }
    }
  });
}

Var masked_total_variation(Tape& tape, Var x, std::span<const float> mask) {
  const Tensor& in = tape.value(x);
  require(in.rank() == 1, "masked_total_variation: expected a vector, got " + to_string(in.shape()));
  check_mask(mask, in.dim(0), "masked_total_variation");
  double acc = 0.0;
  std::size_t pairs = 0;
  for (std::size_t t = 0; t + 1 < in.size(); ++t) {
    if (mask[t] != 0.0f && mask[t + 1] != 0.0f) {
      acc += std::fabs(static_cast<double>(in[t + 1]) - static_cast<double>(in[t]));
      ++pairs;
    }
  }
  const float value = pairs == 0 ? 0.0f : static_cast<float>(acc / static_cast<double>(pairs));
  return tape.record(Tensor::scalar(value), {x}, [x, pairs, m = copy_mask(mask)](Tape& tp, Var self) {
    if (pairs == 0) {
      return;
    }
    const float g = tp.grad(self)[0] / static_cast<float>(pairs);
    const Tensor& src = tp.value(x);
    auto dx = tp.grad_buffer(x);
    for (std::size_t t = 0; t + 1 < m.size(); ++t) {
      if (m[t] == 0.0f || m[t + 1] == 0.0f) {
        continue;
      }
      const float diff = src[t + 1] - src[t];
      if (diff > 0.0f) {
        dx[t + 1] += g;
        dx[t] -= g;
      } else if (diff < 0.0f) {
        dx[t + 1] -= g;
        dx[t] += g;
      }
    }
  });
}

Var sum(Tape& tape, Var x) {
  const Tensor& in = tape.value(x);
  double acc = 0.0;
  for (const float v : in.values()) {
    acc += v;
  }
  return tape.record(Tensor::scalar(static_cast<float>(acc)), {x}, [x](Tape& tp, Var self) {
    const float g = tp.grad(self)[0];
    auto dx = tp.grad_buffer(x);
    for (auto& d : dx) {
      d += g;
    }
  });
}

Var weighted_sum(Tape& tape, const std::vector<std::pair<float, Var>>& terms) {
  double acc = 0.0;
  for (const auto& [w, v] : terms) {
    const Tensor& t = tape.value(v);
    require(t.size() == 1, "weighted_sum: terms must be scalars, got " + to_string(t.shape()));
    acc += static_cast<double>(w) * static_cast<double>(t[0]);
  }
  std::vector<Var> inputs;
  inputs.reserve(terms.size());
  for (const auto& term : terms) {
    inputs.push_back(term.second);
  }
  return tape.record(Tensor::scalar(static_cast<float>(acc)), inputs,
                        [captured = terms](Tape& tp, Var self) {
                          const float g = tp.grad(self)[0];
                          for (const auto& [w, v] : captured) {
                            if (tp.requires_grad(v)) {
                              tp.grad_buffer(v)[0] += w * g;
                            }
                          }
                        });
}

}  // namespace c2f::numerics
