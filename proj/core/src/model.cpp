#include "c2f/model/model.hpp"

#include <cmath>

#include "c2f/errors.hpp"
#include "c2f/numerics/ops.hpp"
#include "c2f/rng.hpp"

namespace c2f::model {

namespace ops = numerics;
using numerics::Shape;
using numerics::Tape;

void ModelConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("model: " + what); };
  if (feature_dim < 1) fail("feature_dim must be >= 1");
  if (num_classes < 1) fail("num_classes must be >= 1");
  if (max_frames < 1) fail("max_frames must be >= 1");
  if (conv_channels < 1) fail("conv_channels must be >= 1");
  if (kernel_width < 1 || kernel_width % 2 == 0) fail("kernel_width must be odd and >= 1");
  if (hidden.empty()) fail("hidden must list at least one layer");
  for (const auto h : hidden) {
    if (h < 1) fail("hidden sizes must be positive");
  }
  if (!(fg_threshold >= 0.0f && fg_threshold < 1.0f)) fail("fg_threshold must be in [0, 1)");
  if (!(topk_ratio > 0.0f && topk_ratio <= 1.0f)) fail("topk_ratio must be in (0, 1]");
  if (heads != HeadLayout::kDecomposed && heads != HeadLayout::kSingle) fail("unknown head layout");
}

std::size_t ModelConfig::topk_for(std::size_t valid_frames) const {
  // The small slack keeps e.g. 0.01f * 200 from flooring to 1.
  const double raw = static_cast<double>(topk_ratio) * static_cast<double>(valid_frames) + 1e-6;
  const auto k = static_cast<std::size_t>(std::floor(raw));
  return k < 1 ? 1 : k;
}

std::vector<numerics::NamedTensor> ModelParams::named() {
  std::vector<numerics::NamedTensor> out;
  out.push_back({"conv.kernel", &conv_kernel});
  out.push_back({"conv.bias", &conv_bias});
  for (std::size_t i = 0; i < fc_weights.size(); ++i) {
    out.push_back({"fc" + std::to_string(i) + ".weight", &fc_weights[i]});
    out.push_back({"fc" + std::to_string(i) + ".bias", &fc_biases[i]});
  }
  out.push_back({"foreground.weight", &fg_weight});
  out.push_back({"foreground.bias", &fg_bias});
  out.push_back({"action.weight", &action_weight});
  out.push_back({"action.bias", &action_bias});
  return out;
}

std::vector<const Tensor*> ModelParams::tensors() const {
  std::vector<const Tensor*> out{&conv_kernel, &conv_bias};
  for (std::size_t i = 0; i < fc_weights.size(); ++i) {
    out.push_back(&fc_weights[i]);
    out.push_back(&fc_biases[i]);
  }
  out.insert(out.end(), {&fg_weight, &fg_bias, &action_weight, &action_bias});
  return out;
}

void ModelParams::zero_grad() {
  for (auto& p : named()) {
    if (p.tensor->tracks_grad()) {
      p.tensor->zero_grad();
    } else {
      p.tensor->track_grad();
    }
  }
}

bool ModelParams::identical(const ModelParams& other) const {
  const auto a = tensors();
  const auto b = other.tensors();
  if (a.size() != b.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i]->identical(*b[i])) {
      return false;
    }
  }
  return true;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto* t : tensors()) {
    n += t->size();
  }
  return n;
}

namespace {

Tensor uniform_tensor(Shape shape, std::size_t fan_in, Rng& rng) {
  Tensor t(std::move(shape));
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (auto& v : t.values()) {
    v = static_cast<float>(rng.uniform(-bound, bound));
  }
  return t;
}

}  // namespace

ModelParams init_params(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(derive_seed(seed, "model.init"));
  ModelParams p;
  p.config = config;
  const std::size_t d = config.feature_dim;
  const std::size_t k = config.kernel_width;
  const std::size_t hc = config.conv_channels;
  p.conv_kernel = uniform_tensor({k, d, hc}, k * d, rng);
  p.conv_bias = Tensor(Shape{hc});
  std::size_t in = hc;
  for (const auto h : config.hidden) {
    p.fc_weights.push_back(uniform_tensor({in, h}, in, rng));
    p.fc_biases.emplace_back(Shape{h});
    in = h;
  }
  p.fg_weight = uniform_tensor({in, 1}, in, rng);
  p.fg_bias = Tensor(Shape{1}, -2.0f);
  p.action_weight = uniform_tensor({in, config.num_classes}, in, rng);
  p.action_bias = Tensor(Shape{config.num_classes});
  return p;
}

namespace {

struct Bound {
  Var conv_kernel, conv_bias;
  std::vector<Var> fc_weights, fc_biases;
  Var fg_weight, fg_bias, action_weight, action_bias;
};

// Params is ModelParams or const ModelParams; Bind maps each tensor to a
// tape leaf in the fixed parameter order.
template <typename Params, typename Bind>
Bound bind_all(Params& p, Bind&& bind) {
  Bound b;
  b.conv_kernel = bind(p.conv_kernel);
  b.conv_bias = bind(p.conv_bias);
  for (std::size_t i = 0; i < p.fc_weights.size(); ++i) {
    b.fc_weights.push_back(bind(p.fc_weights[i]));
    b.fc_biases.push_back(bind(p.fc_biases[i]));
  }
  b.fg_weight = bind(p.fg_weight);
  b.fg_bias = bind(p.fg_bias);
  b.action_weight = bind(p.action_weight);
  b.action_bias = bind(p.action_bias);
  return b;
}

ScoreGraph build(Tape& tape, const ModelConfig& config, const Bound& b, const Tensor& features,
                 std::span<const float> mask) {
  if (features.rank() != 2) {
    throw DimensionError("forward: features must be [T x D], got " + numerics::to_string(features.shape()));
  }
  if (features.dim(1) != config.feature_dim) {
    throw DimensionError("forward: feature dim " + std::to_string(features.dim(1)) +
                         " does not match model feature_dim " + std::to_string(config.feature_dim));
  }
  const std::size_t frames = features.dim(0);
  if (mask.size() != frames) {
    throw DimensionError("forward: mask has " + std::to_string(mask.size()) + " entries for " +
                         std::to_string(frames) + " frames");
  }
  std::size_t valid = 0;
  for (const float m : mask) {
    valid += m != 0.0f ? 1 : 0;
  }
  if (valid == 0) {
    throw ContractError("forward: mask marks no valid frames");
  }

  // Padding rows are zeroed before the conv so they cannot leak into the
  // receptive field of a real frame.
  Tensor input(features.shape());
  const std::size_t d = config.feature_dim;
  for (std::size_t t = 0; t < frames; ++t) {
    if (mask[t] == 0.0f) {
      continue;
    }
    for (std::size_t j = 0; j < d; ++j) {
      input[t * d + j] = features[t * d + j];
    }
  }
  Var h = ops::relu(tape, ops::conv1d_temporal(tape, tape.constant(std::move(input)),
                                               b.conv_kernel, b.conv_bias));
  for (std::size_t i = 0; i < b.fc_weights.size(); ++i) {
    h = ops::relu(tape, ops::fully_connected(tape, h, b.fc_weights[i], b.fc_biases[i]));
  }

  ScoreGraph g;
  g.topk = config.topk_for(valid);
  g.conditional = ops::mask_rows(
      tape, ops::sigmoid(tape, ops::fully_connected(tape, h, b.action_weight, b.action_bias)),
      mask);
  if (config.heads == HeadLayout::kDecomposed) {
    Var fg_logit = ops::fully_connected(tape, h, b.fg_weight, b.fg_bias);
    g.foreground =
        ops::mask_rows(tape, ops::reshape(tape, ops::sigmoid(tape, fg_logit), Shape{frames}), mask);
    g.foreground_thresholded = ops::threshold(tape, g.foreground, config.fg_threshold);
    g.action = ops::scale_rows(tape, g.conditional, g.foreground);
  } else {
    g.action = g.conditional;
  }
  g.video = ops::topk_mean_columns(tape, g.action, mask, g.topk);
  return g;
}

}  // namespace

ScoreGraph build_scores(Tape& tape, ModelParams& params, const Tensor& features,
                        std::span<const float> mask) {
  const Bound b = bind_all(params, [&](Tensor& t) { return tape.parameter(t); });
  return build(tape, params.config, b, features, mask);
}

ScoreBundle forward(const ModelParams& params, const Tensor& features,
                    std::span<const float> mask) {
  Tape tape;
  const Bound b = bind_all(params, [&](const Tensor& t) { return tape.constant_ref(t); });
  const ScoreGraph g = build(tape, params.config, b, features, mask);

  ScoreBundle out;
  for (const float m : mask) {
    out.valid_frames += m != 0.0f ? 1 : 0;
  }
  out.conditional = tape.value(g.conditional);
  out.action = tape.value(g.action);
  out.video = tape.value(g.video);
  if (g.foreground.valid()) {
    out.foreground = tape.value(g.foreground);
    out.foreground_thresholded = tape.value(g.foreground_thresholded);
  } else {
    // A single-head model has no foreground factor; F = 1 on real frames
    // keeps AS = F * CS true.
    out.foreground = Tensor(Shape{mask.size()});
    for (std::size_t t = 0; t < mask.size(); ++t) {
      out.foreground[t] = mask[t] != 0.0f ? 1.0f : 0.0f;
    }
    out.foreground_thresholded = out.foreground;
  }
  return out;
}

Tensor threshold_foreground(const Tensor& foreground, float threshold) {
  Tensor out(foreground.shape());
  for (std::size_t i = 0; i < foreground.size(); ++i) {
    out[i] = foreground[i] >= threshold ? foreground[i] : 0.0f;
  }
  return out;
}

}  // namespace c2f::model
