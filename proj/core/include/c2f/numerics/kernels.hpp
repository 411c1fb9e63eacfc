#pragma once

#include <cstddef>
#include <span>

namespace c2f::numerics::kernels {

// Raw row-major loops behind the differentiable ops. Every output element is
// accumulated in ascending reduction-index order starting from its bias (or
// zero), which is what the loop oracles in the tests do too.

// out[m x n] = bias[n] + a[m x k] * b[k x n]. Empty bias means zero.
void affine(std::span<const float> a, std::span<const float> b, std::span<const float> bias,
            std::span<float> out, std::size_t m, std::size_t k, std::size_t n);

// out[m x k] += g[m x n] * b[k x n]^T
void accumulate_a_grad(std::span<const float> g, std::span<const float> b, std::span<float> out,
                       std::size_t m, std::size_t k, std::size_t n);

// out[k x n] += a[m x k]^T * g[m x n]
void accumulate_b_grad(std::span<const float> a, std::span<const float> g, std::span<float> out,
                       std::size_t m, std::size_t k, std::size_t n);

// out[n] += column sums of g[m x n]
void accumulate_bias_grad(std::span<const float> g, std::span<float> out, std::size_t m,
                          std::size_t n);

// Same-length temporal convolution with symmetric zero padding of
// (width - 1) / 2 frames:
//   out[t, h] = bias[h] + sum_{j, d} x[t + j - pad, d] * w[j, d, h]
// x: frames x depth, w: width x depth x channels.
void conv1d(std::span<const float> x, std::span<const float> w, std::span<const float> bias,
            std::span<float> out, std::size_t frames, std::size_t depth, std::size_t width,
            std::size_t channels);

void conv1d_input_grad(std::span<const float> g, std::span<const float> w, std::span<float> dx,
                       std::size_t frames, std::size_t depth, std::size_t width,
                       std::size_t channels);

void conv1d_kernel_grad(std::span<const float> x, std::span<const float> g, std::span<float> dw,
                        std::size_t frames, std::size_t depth, std::size_t width,
                        std::size_t channels);

}  // namespace c2f::numerics::kernels
