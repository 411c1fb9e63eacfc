#include "c2f/numerics/kernels.hpp"

#include <algorithm>
#include <vector>

namespace c2f::numerics::kernels {

void affine(std::span<const float> a, std::span<const float> b, std::span<const float> bias,
            std::span<float> out, std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    float* __restrict row = out.data() + i * n;
    if (bias.empty()) {
      std::fill(row, row + n, 0.0f);
    } else {
      std::copy(bias.begin(), bias.end(), row);
    }
    const float* arow = a.data() + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const float av = arow[p];
      const float* __restrict brow = b.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) {
        row[j] += av * brow[j];
      }
    }
  }
}

void accumulate_a_grad(std::span<const float> g, std::span<const float> b, std::span<float> out,
                       std::size_t m, std::size_t k, std::size_t n) {
  // Transpose b once so the inner loop streams contiguous rows.
  std::vector<float> bt(k * n);
  for (std::size_t p = 0; p < k; ++p) {
    for (std::size_t j = 0; j < n; ++j) {
      bt[j * k + p] = b[p * n + j];
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    float* __restrict row = out.data() + i * k;
    const float* grow = g.data() + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      const float gv = grow[j];
      if (gv == 0.0f) {
        continue;
      }
      const float* __restrict btrow = bt.data() + j * k;
      for (std::size_t p = 0; p < k; ++p) {
        row[p] += gv * btrow[p];
      }
    }
  }
}

void accumulate_b_grad(std::span<const float> a, std::span<const float> g, std::span<float> out,
                       std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const float* arow = a.data() + i * k;
    const float* __restrict grow = g.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const float av = arow[p];
      if (av == 0.0f) {
        continue;
      }
      float* __restrict orow = out.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) {
        orow[j] += av * grow[j];
      }
    }
  }
}

void accumulate_bias_grad(std::span<const float> g, std::span<float> out, std::size_t m,
                          std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const float* grow = g.data() + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      out[j] += grow[j];
    }
  }
}

void conv1d(std::span<const float> x, std::span<const float> w, std::span<const float> bias,
            std::span<float> out, std::size_t frames, std::size_t depth, std::size_t width,
            std::size_t channels) {
  const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>(width / 2);
  const auto t_count = static_cast<std::ptrdiff_t>(frames);
  for (std::ptrdiff_t t = 0; t < t_count; ++t) {
    float* __restrict row = out.data() + static_cast<std::size_t>(t) * channels;
    std::copy(bias.begin(), bias.end(), row);
    for (std::size_t j = 0; j < width; ++j) {
      const std::ptrdiff_t src = t + static_cast<std::ptrdiff_t>(j) - pad;
      if (src < 0 || src >= t_count) {
        continue;
      }
      const float* xrow = x.data() + static_cast<std::size_t>(src) * depth;
      for (std::size_t d = 0; d < depth; ++d) {
        const float xv = xrow[d];
        const float* __restrict wrow = w.data() + (j * depth + d) * channels;
        for (std::size_t h = 0; h < channels; ++h) {
          row[h] += xv * wrow[h];
        }
      }
    }
  }
}

void conv1d_input_grad(std::span<const float> g, std::span<const float> w, std::span<float> dx,
                       std::size_t frames, std::size_t depth, std::size_t width,
                       std::size_t channels) {
  // wt[j][h][d] = w[j][d][h]
  std::vector<float> wt(width * depth * channels);
  for (std::size_t j = 0; j < width; ++j) {
    for (std::size_t d = 0; d < depth; ++d) {
      for (std::size_t h = 0; h < channels; ++h) {
        wt[(j * channels + h) * depth + d] = w[(j * depth + d) * channels + h];
      }
    }
  }
  const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>(width / 2);
  const auto t_count = static_cast<std::ptrdiff_t>(frames);
  for (std::ptrdiff_t t = 0; t < t_count; ++t) {
    const float* grow = g.data() + static_cast<std::size_t>(t) * channels;
    for (std::size_t j = 0; j < width; ++j) {
      const std::ptrdiff_t src = t + static_cast<std::ptrdiff_t>(j) - pad;
      if (src < 0 || src >= t_count) {
        continue;
      }
      float* __restrict dxrow = dx.data() + static_cast<std::size_t>(src) * depth;
      for (std::size_t h = 0; h < channels; ++h) {
        const float gv = grow[h];
        const float* __restrict wtrow = wt.data() + (j * channels + h) * depth;
        for (std::size_t d = 0; d < depth; ++d) {
          dxrow[d] += gv * wtrow[d];
        }
      }
    }
  }
}

void conv1d_kernel_grad(std::span<const float> x, std::span<const float> g, std::span<float> dw,
                        std::size_t frames, std::size_t depth, std::size_t width,
                        std::size_t channels) {
  const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>(width / 2);
  const auto t_count = static_cast<std::ptrdiff_t>(frames);
  for (std::ptrdiff_t t = 0; t < t_count; ++t) {
    const float* __restrict grow = g.data() + static_cast<std::size_t>(t) * channels;
    for (std::size_t j = 0; j < width; ++j) {
      const std::ptrdiff_t src = t + static_cast<std::ptrdiff_t>(j) - pad;
      if (src < 0 || src >= t_count) {
        continue;
      }
      const float* xrow = x.data() + static_cast<std::size_t>(src) * depth;
      for (std::size_t d = 0; d < depth; ++d) {
        const float xv = xrow[d];
        if (xv == 0.0f) {
          continue;
        }
        float* __restrict dwrow = dw.data() + (j * depth + d) * channels;
        for (std::size_t h = 0; h < channels; ++h) {
          dwrow[h] += xv * grow[h];
        }
      }
    }
  }
}

}  // namespace c2f::numerics::kernels
