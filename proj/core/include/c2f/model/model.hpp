#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "c2f/numerics/adam.hpp"
#include "c2f/numerics/tape.hpp"
#include "c2f/numerics/tensor.hpp"

namespace c2f::model {

using numerics::Tensor;
using numerics::Var;

// kDecomposed: foreground head times conditional action head.
// kSingle: one action head scores P(A|X) directly (the FO / FO+VL arms).
enum class HeadLayout : std::uint32_t { kDecomposed = 0, kSingle = 1 };

struct ModelConfig {
  std::size_t feature_dim = 32;
  std::size_t num_classes = 4;
  std::size_t max_frames = 240;
  std::size_t conv_channels = 64;
  std::size_t kernel_width = 3;
  std::vector<std::size_t> hidden = {1024, 512};
  float fg_threshold = 0.05f;
  float topk_ratio = 0.01f;
  HeadLayout heads = HeadLayout::kDecomposed;

  // Throws ConfigError on the first violated invariant.
  void validate() const;

  // k of the top-k video score for a video with `valid_frames` real frames:
  // max(1, floor(topk_ratio * valid_frames)).
  std::size_t topk_for(std::size_t valid_frames) const;
};

// Trunk: conv -> relu -> (fc -> relu) per hidden layer. Heads are one fc
// each on the last hidden layer. The foreground head is always allocated so
// checkpoints have a single layout; single-head models never read it.
struct ModelParams {
  ModelConfig config;
  Tensor conv_kernel;  // [K x D x conv_channels]
  Tensor conv_bias;    // [conv_channels]
  std::vector<Tensor> fc_weights;
  std::vector<Tensor> fc_biases;
  Tensor fg_weight;  // [hidden.back() x 1]
  Tensor fg_bias;    // [1]
  Tensor action_weight;  // [hidden.back() x C]
  Tensor action_bias;    // [C]

  // Fixed order used by checkpoints, the optimizer and gradient checks:
  // conv.kernel, conv.bias, fc<i>.weight, fc<i>.bias..., foreground.weight,
  // foreground.bias, action.weight, action.bias.
  std::vector<numerics::NamedTensor> named();
  std::vector<const Tensor*> tensors() const;

  void zero_grad();
  bool identical(const ModelParams& other) const;
  std::size_t parameter_count() const;
};

// Fan-in scaled uniform weights U(-1/sqrt(fan_in), 1/sqrt(fan_in)), zero
// biases, foreground bias -2.
ModelParams init_params(const ModelConfig& config, std::uint64_t seed);

// Per-frame and per-video scores. Rows past valid_frames are padding and
// hold zeros.
struct ScoreBundle {
  std::size_t valid_frames = 0;
  Tensor foreground;              // F [T]
  Tensor foreground_thresholded;  // [T]
  Tensor conditional;             // CS [T x C]
  Tensor action;                  // AS [T x C]
  Tensor video;                   // y [C]
};

// Handles of the scores inside a tape, for loss construction.
struct ScoreGraph {
  Var foreground;              // invalid for single-head models
  Var foreground_thresholded;  // invalid for single-head models
  Var conditional;
  Var action;
  Var video;
  std::size_t topk = 0;
};

// Records the forward pass with every parameter tracked; backward() on a
// loss built from the graph accumulates into params' grad buffers.
// features: [T x D], mask: [T] of 0/1.
ScoreGraph build_scores(numerics::Tape& tape, ModelParams& params, const Tensor& features,
                        std::span<const float> mask);

// Inference-only forward pass.
ScoreBundle forward(const ModelParams& params, const Tensor& features, std::span<const float> mask);

// Elementwise: entries < threshold become 0, the rest pass through.
Tensor threshold_foreground(const Tensor& foreground, float threshold);

}  // namespace c2f::model
