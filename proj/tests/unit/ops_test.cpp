#include <gtest/gtest.h>

#include <cmath>

#include "c2f/errors.hpp"
#include "c2f/numerics/ops.hpp"
#include "c2f/rng.hpp"
#include "support/oracles.hpp"

using namespace c2f;
using namespace c2f::numerics;

namespace {

Tensor vec(std::vector<float> v) { return Tensor::vector(std::move(v)); }

}  // namespace

TEST(Conv1d, IdentityKernelAndZeroInput) {
  Tape tape;
  Tensor x(Shape{4, 2}, std::vector<float>{1, 2, 3, 4, 5, 6, 7, 8});
  Tensor id(Shape{1, 2, 2}, std::vector<float>{1, 0, 0, 1});
  const Var y = conv1d_temporal(tape, tape.constant(x), tape.constant(id),
                                tape.constant(Tensor(Shape{2})));
  EXPECT_TRUE(tape.value(y).identical(x));

  Tensor b(Shape{3}, std::vector<float>{0.5f, -1.0f, 2.0f});
  Tensor w(Shape{3, 2, 3}, 0.7f);
  const Var z = conv1d_temporal(tape, tape.constant(Tensor(Shape{5, 2})), tape.constant(w),
                                tape.constant(b));
  for (std::size_t t = 0; t < 5; ++t)
    for (std::size_t h = 0; h < 3; ++h) EXPECT_EQ(tape.value(z).at(t, h), b[h]);
}

TEST(FullyConnected, IdentityAndBias) {
  Tape tape;
  Tensor x(Shape{2, 2}, std::vector<float>{1, 2, 3, 4});
  Tensor id(Shape{2, 2}, std::vector<float>{1, 0, 0, 1});
  const Var y = fully_connected(tape, tape.constant(x), tape.constant(id),
                                tape.constant(Tensor(Shape{2})));
  EXPECT_TRUE(tape.value(y).identical(x));
  Tensor b = vec({3, -4});
  const Var z = fully_connected(tape, tape.constant(Tensor(Shape{1, 2})), tape.constant(id),
                                tape.constant(b));
  EXPECT_EQ(tape.value(z)[0], 3.0f);
  EXPECT_EQ(tape.value(z)[1], -4.0f);
}

TEST(Activations, Values) {
  Tape tape;
  const Var s = sigmoid(tape, tape.constant(vec({0.0f, 100.0f, -100.0f})));
  EXPECT_EQ(tape.value(s)[0], 0.5f);
  EXPECT_LT(tape.value(s)[1], 1.0f);
  EXPECT_GT(tape.value(s)[2], 0.0f);
  const Var r = relu(tape, tape.constant(vec({-2.0f, 3.0f})));
  EXPECT_EQ(tape.value(r)[0], 0.0f);
  EXPECT_EQ(tape.value(r)[1], 3.0f);
}

TEST(Activations, SigmoidClosedFormGradient) {
  // d/dw sigmoid(w x) = s (1 - s) x
  Tensor w(Shape{1, 1}, 0.7f);
  Tape tape;
  const float x = 1.3f;
  const Var wx = fully_connected(tape, tape.constant(Tensor(Shape{1, 1}, x)),
                                 tape.parameter(w), tape.constant(Tensor(Shape{1})));
  const Var y = sum(tape, sigmoid(tape, wx));
  tape.backward(y);
  const double s = 1.0 / (1.0 + std::exp(-0.7 * 1.3));
  EXPECT_NEAR(w.grad()[0], s * (1 - s) * x, 1e-6);
}

TEST(Activations, SumGradientIsOnes) {
  Tape tape;
  const Var x = tape.variable(Tensor(Shape{3, 2}, 2.0f));
  tape.backward(sum(tape, x));
  for (const float g : tape.grad(x)) EXPECT_EQ(g, 1.0f);
}

TEST(TopK, Examples) {
  Tape tape;
  const std::vector<float> all(3, 1.0f);
  EXPECT_EQ(tape.value(topk_mean(tape, tape.constant(vec({1, 2, 3})), all, 2)).item(), 2.5f);
  // k >= valid count: plain masked mean.
  const std::vector<float> mask = {1, 0, 1};
  EXPECT_EQ(tape.value(topk_mean(tape, tape.constant(vec({1, 9, 3})), mask, 5)).item(), 2.0f);
  EXPECT_THROW(topk_mean(tape, tape.constant(vec({1, 2, 3})), all, 0), ContractError);
  EXPECT_THROW(topk_mean(tape, tape.constant(vec({1, 2, 3})), std::vector<float>(3, 0.0f), 1),
               ContractError);
}

TEST(TopK, MatchesSortOracleOnRandomVectors) {
  Rng r(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t T = 1 + r.below(64);
    std::vector<float> s(T), m(T);
    for (std::size_t t = 0; t < T; ++t) {
      // Coarse values so ties happen.
      s[t] = trial % 3 == 0 ? static_cast<float>(r.below(5)) : static_cast<float>(r.uniform());
      m[t] = r.uniform() < 0.85 ? 1.0f : 0.0f;
    }
    m[r.below(T)] = 1.0f;
    const std::size_t k = 1 + r.below(T + 2);
    Tape tape;
    const float got = tape.value(topk_mean(tape, tape.constant(Tensor::vector(s)), m, k)).item();
    ASSERT_EQ(got, check::topk_oracle(s, m, k)) << "trial " << trial;
  }
}

TEST(TopK, GradientSpreadsOverSelectedFrames) {
  Tape tape;
  const Var x = tape.variable(vec({0.1f, 0.9f, 0.5f, 0.7f}));
  tape.backward(topk_mean(tape, x, std::vector<float>(4, 1.0f), 2));
  const auto g = tape.grad(x);
  EXPECT_EQ(g[0], 0.0f);
  EXPECT_EQ(g[1], 0.5f);
  EXPECT_EQ(g[2], 0.0f);
  EXPECT_EQ(g[3], 0.5f);
}

TEST(TopK, ColumnsEqualPerColumnTopK) {
  Rng r(3);
  const std::size_t T = 20, C = 3;
  std::vector<float> s(T * C), mask(T, 1.0f);
  for (auto& v : s) v = static_cast<float>(r.uniform());
  mask[4] = 0.0f;
  Tape tape;
  const Var y = topk_mean_columns(tape, tape.constant(Tensor(Shape{T, C}, s)), mask, 3);
  for (std::size_t c = 0; c < C; ++c) {
    std::vector<float> col(T);
    for (std::size_t t = 0; t < T; ++t) col[t] = s[t * C + c];
    EXPECT_EQ(tape.value(y)[c], check::topk_oracle(col, mask, 3));
  }
}

TEST(Threshold, KeepsBoundary) {
  Tape tape;
  const Var y = threshold(tape, tape.constant(vec({0.04f, 0.05f, 0.9f})), 0.05f);
  EXPECT_EQ(tape.value(y)[0], 0.0f);
  EXPECT_EQ(tape.value(y)[1], 0.05f);
  EXPECT_EQ(tape.value(y)[2], 0.9f);
}

TEST(MaskRows, ZeroesPaddingAndBlocksGradient) {
  Tape tape;
  const Var x = tape.variable(Tensor(Shape{3, 2}, 1.0f));
  const Var y = mask_rows(tape, x, std::vector<float>{1, 0, 1});
  EXPECT_EQ(tape.value(y).at(1, 0), 0.0f);
  tape.backward(sum(tape, y));
  EXPECT_EQ(tape.grad(x)[2], 0.0f);
  EXPECT_EQ(tape.grad(x)[0], 1.0f);
}

TEST(ScaleRows, Values) {
  Tape tape;
  const Var y = scale_rows(tape, tape.constant(Tensor(Shape{2, 2}, std::vector<float>{1, 2, 3, 4})),
                           tape.constant(vec({2, 0.5f})));
  EXPECT_EQ(tape.value(y)[1], 4.0f);
  EXPECT_EQ(tape.value(y)[3], 2.0f);
}

TEST(MaskedReductions, AbsMeanAndTotalVariation) {
  Tape tape;
  const std::vector<float> two(2, 1.0f);
  EXPECT_FLOAT_EQ(tape.value(masked_abs_mean(tape, tape.constant(vec({0.2f, 0.4f})), two)).item(),
                  0.3f);
  const std::vector<float> three(3, 1.0f);
  EXPECT_FLOAT_EQ(
      tape.value(masked_total_variation(tape, tape.constant(vec({0, 1, 0})), three)).item(), 1.0f);
}
