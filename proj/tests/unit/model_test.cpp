#include <gtest/gtest.h>

#include "c2f/errors.hpp"
#include "c2f/model/model.hpp"
#include "c2f/rng.hpp"

using namespace c2f;
using namespace c2f::model;
using numerics::Shape;

namespace {

ModelConfig small(HeadLayout heads = HeadLayout::kDecomposed) {
  ModelConfig c;
  c.feature_dim = 5;
  c.num_classes = 3;
  c.max_frames = 20;
  c.conv_channels = 6;
  c.hidden = {8, 4};
  c.heads = heads;
  return c;
}

Tensor noise(std::size_t t, std::size_t d, std::uint64_t seed) {
  Rng r(seed);
  Tensor x(Shape{t, d});
  for (auto& v : x.values()) v = static_cast<float>(r.normal());
  return x;
}

}  // namespace

TEST(Model, ZeroWeightsGiveHalfScores) {
  ModelParams p = init_params(small(), 1);
  for (auto& nt : p.named())
    for (auto& v : nt.tensor->values()) v = 0.0f;
  const std::vector<float> mask(10, 1.0f);
  const ScoreBundle b = forward(p, Tensor(Shape{10, 5}), mask);
  for (std::size_t t = 0; t < 10; ++t) {
    EXPECT_EQ(b.foreground[t], 0.5f);
    for (std::size_t c = 0; c < 3; ++c) {
      EXPECT_EQ(b.conditional.at(t, c), 0.5f);
      EXPECT_EQ(b.action.at(t, c), 0.25f);
    }
  }
  EXPECT_EQ(b.video[0], 0.25f);
}

TEST(Model, ShapesAndComposition) {
  ModelParams p = init_params(small(), 2);
  const std::vector<float> mask(20, 1.0f);
  const ScoreBundle b = forward(p, noise(20, 5, 3), mask);
  EXPECT_EQ(b.foreground.shape(), (Shape{20}));
  EXPECT_EQ(b.conditional.shape(), (Shape{20, 3}));
  EXPECT_EQ(b.action.shape(), (Shape{20, 3}));
  EXPECT_EQ(b.video.shape(), (Shape{3}));
  for (std::size_t t = 0; t < 20; ++t)
    for (std::size_t c = 0; c < 3; ++c)
      EXPECT_EQ(b.action.at(t, c), b.foreground[t] * b.conditional.at(t, c));
  // Top-k at 20 frames with ratio 0.01 is the column maximum.
  for (std::size_t c = 0; c < 3; ++c) {
    float m = 0.0f;
    for (std::size_t t = 0; t < 20; ++t) m = std::max(m, b.action.at(t, c));
    EXPECT_EQ(b.video[c], m);
  }
}

TEST(Model, TopkCountFollowsRatio) {
  ModelConfig c;
  EXPECT_EQ(c.topk_for(240), 2u);
  EXPECT_EQ(c.topk_for(200), 2u);
  EXPECT_EQ(c.topk_for(99), 1u);
  EXPECT_EQ(c.topk_for(3600), 36u);
}

TEST(Model, PaddingDoesNotChangeRealFrames) {
  ModelParams p = init_params(small(), 4);
  const Tensor x = noise(12, 5, 5);
  const ScoreBundle a = forward(p, x, std::vector<float>(12, 1.0f));
  Tensor padded(Shape{20, 5});
  for (std::size_t i = 0; i < x.size(); ++i) padded[i] = x[i];
  for (std::size_t i = x.size(); i < padded.size(); ++i) padded[i] = 100.0f;
  std::vector<float> mask(20, 0.0f);
  for (std::size_t t = 0; t < 12; ++t) mask[t] = 1.0f;
  const ScoreBundle b = forward(p, padded, mask);
  EXPECT_EQ(b.valid_frames, 12u);
  for (std::size_t t = 0; t < 12; ++t)
    for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(a.action.at(t, c), b.action.at(t, c));
  for (std::size_t t = 12; t < 20; ++t) EXPECT_EQ(b.foreground[t], 0.0f);
  for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(a.video[c], b.video[c]);
}

TEST(Model, SingleHeadHasUnitForeground) {
  ModelParams p = init_params(small(HeadLayout::kSingle), 6);
  const ScoreBundle b = forward(p, noise(8, 5, 7), std::vector<float>(8, 1.0f));
  for (std::size_t t = 0; t < 8; ++t) EXPECT_EQ(b.foreground[t], 1.0f);
  EXPECT_TRUE(b.action.identical(b.conditional));
}

TEST(Model, ThresholdForeground) {
  const Tensor f = Tensor::vector({0.04f, 0.05f, 0.9f});
  const Tensor g = threshold_foreground(f, 0.05f);
  EXPECT_EQ(g[0], 0.0f);
  EXPECT_EQ(g[1], 0.05f);
  EXPECT_EQ(g[2], 0.9f);
}

TEST(Model, InitIsSeededAndScaled) {
  const ModelParams a = init_params(small(), 9), b = init_params(small(), 9),
                    c = init_params(small(), 10);
  EXPECT_TRUE(a.identical(b));
  EXPECT_FALSE(a.identical(c));
  const float bound = 1.0f / std::sqrt(3.0f * 5.0f);
  for (const float v : a.conv_kernel.values()) EXPECT_LE(std::abs(v), bound);
  EXPECT_EQ(a.fg_bias[0], -2.0f);
  EXPECT_EQ(a.conv_kernel.shape(), (Shape{3, 5, 6}));
}

TEST(Model, Errors) {
  ModelConfig bad = small();
  bad.kernel_width = 4;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = small();
  bad.hidden.clear();
  EXPECT_THROW(bad.validate(), ConfigError);
  ModelParams p = init_params(small(), 1);
  EXPECT_THROW(forward(p, Tensor(Shape{4, 6}), std::vector<float>(4, 1.0f)), DimensionError);
  EXPECT_THROW(forward(p, Tensor(Shape{4, 5}), std::vector<float>(3, 1.0f)), DimensionError);
  EXPECT_THROW(forward(p, Tensor(Shape{4, 5}), std::vector<float>(4, 0.0f)), ContractError);
}
