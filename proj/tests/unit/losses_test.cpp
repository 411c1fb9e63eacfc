#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "c2f/errors.hpp"
#include "c2f/losses.hpp"
#include "c2f/numerics/ops.hpp"
#include "c2f/rng.hpp"

using namespace c2f;
using namespace c2f::numerics;
using namespace c2f::losses;

namespace {

Tensor vec(std::vector<float> v) { return Tensor::vector(std::move(v)); }

double bce_oracle(const std::vector<float>& p, const std::vector<float>& y,
                  const std::vector<float>& w) {
  double s = 0;
  int n = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (w[i] <= 0) continue;
    const double q = std::clamp<double>(p[i], 1e-7, 1 - 1e-7);
    s += -(y[i] * std::log(q) + (1 - y[i]) * std::log(1 - q));
    ++n;
  }
  return n ? s / n : 0.0;
}

}  // namespace

TEST(Bce, HalfGivesLn2) {
  Tape tape;
  const std::vector<float> y = {1, 0, 1, 0}, m(4, 1.0f);
  const Term t = bce_foreground(tape, tape.constant(Tensor(Shape{4}, 0.5f)), y, m);
  EXPECT_FALSE(t.empty);
  EXPECT_NEAR(tape.value(t.value).item(), std::log(2.0), 1e-6);
}

TEST(Bce, PerfectScoresHitClampFloor) {
  Tape tape;
  const std::vector<float> y = {1, 0, 1}, m(3, 1.0f);
  const Var l = bce_foreground(tape, tape.constant(vec({1, 0, 1})), y, m).value;
  const float v = tape.value(l).item();
  EXPECT_GT(v, 0.0f);
  EXPECT_LE(v, 1.6e-6f);
}

TEST(Bce, MatchesScalarLoopOracle) {
  Rng r(17);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + r.below(30);
    std::vector<float> p(n), y(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = static_cast<float>(r.uniform());
      y[i] = r.bernoulli(0.5) ? 1.0f : 0.0f;
      w[i] = r.bernoulli(0.7) ? 1.0f : 0.0f;
    }
    Tape tape;
    const float got = tape.value(bce_foreground(tape, tape.constant(vec(p)), y, w).value).item();
    EXPECT_NEAR(got, bce_oracle(p, y, w), 1e-6);
  }
}

TEST(Bce, EmptyMaskIsZeroAndFlagged) {
  Tape tape;
  const Term t = bce_foreground(tape, tape.constant(vec({0.3f})), std::vector<float>{1},
                                std::vector<float>{0});
  EXPECT_TRUE(t.empty);
  EXPECT_EQ(tape.value(t.value).item(), 0.0f);
}

TEST(TotalMass, IndicatorAndValues) {
  Tape tape;
  const std::vector<float> m(2, 1.0f);
  const Var f = tape.constant(vec({0.2f, 0.4f}));
  EXPECT_EQ(tape.value(total_mass_bg(tape, f, m, false)).item(), 0.0f);
  EXPECT_FLOAT_EQ(tape.value(total_mass_bg(tape, f, m, true)).item(), 0.3f);
  EXPECT_EQ(tape.value(total_mass_bg(tape, tape.constant(vec({0, 0})), m, true)).item(), 0.0f);
}

TEST(Laplacian, ValuesAndReversal) {
  Tape tape;
  const std::vector<float> m3(3, 1.0f);
  EXPECT_FLOAT_EQ(tape.value(laplacian_reg(tape, tape.constant(vec({0, 1, 0})), m3)).item(), 1.0f);
  EXPECT_EQ(tape.value(laplacian_reg(tape, tape.constant(vec({0.3f, 0.3f, 0.3f})), m3)).item(),
            0.0f);
  Rng r(4);
  std::vector<float> f(12), m(12, 1.0f);
  for (auto& x : f) x = static_cast<float>(r.uniform());
  std::vector<float> rev(f.rbegin(), f.rend());
  EXPECT_FLOAT_EQ(tape.value(laplacian_reg(tape, tape.constant(vec(f)), m)).item(),
                  tape.value(laplacian_reg(tape, tape.constant(vec(rev)), m)).item());
}

TEST(Conditional, BgOnlyContributesZeroAndHalfGivesLn2) {
  Tape tape;
  const std::vector<float> labels = {1, 0, 0, 1};
  const Term empty = conditional_loss(tape, tape.constant(Tensor(Shape{2, 2}, 0.5f)), labels,
                                      std::vector<float>{0, 0});
  EXPECT_TRUE(empty.empty);
  EXPECT_EQ(tape.value(empty.value).item(), 0.0f);
  const Term half = conditional_loss(tape, tape.constant(Tensor(Shape{2, 2}, 0.5f)), labels,
                                     std::vector<float>{1, 1});
  EXPECT_NEAR(tape.value(half.value).item(), std::log(2.0), 1e-6);
}

TEST(Conditional, MatchesScalarLoopOracle) {
  Rng r(8);
  const std::size_t T = 10, C = 3;
  std::vector<float> cs(T * C), lab(T * C), fg(T), w(T * C);
  for (std::size_t i = 0; i < T * C; ++i) {
    cs[i] = static_cast<float>(r.uniform());
    lab[i] = r.bernoulli(0.3) ? 1.0f : 0.0f;
  }
  for (std::size_t t = 0; t < T; ++t) {
    fg[t] = r.bernoulli(0.5) ? 1.0f : 0.0f;
    for (std::size_t c = 0; c < C; ++c) w[t * C + c] = fg[t];
  }
  Tape tape;
  const float got =
      tape.value(conditional_loss(tape, tape.constant(Tensor(Shape{T, C}, cs)), lab, fg).value)
          .item();
  EXPECT_NEAR(got, bce_oracle(cs, lab, w), 1e-6);
}

TEST(Video, Values) {
  Tape tape;
  const std::vector<float> y = {1, 0, 1};
  EXPECT_NEAR(tape.value(video_loss(tape, tape.constant(Tensor(Shape{3}, 0.5f)), y)).item(),
              std::log(2.0), 1e-6);
  EXPECT_LT(tape.value(video_loss(tape, tape.constant(vec({1, 0, 1})), y)).item(), 1e-6f);
  Rng r(2);
  std::vector<float> p(5), lab(5);
  for (std::size_t i = 0; i < 5; ++i) {
    p[i] = static_cast<float>(r.uniform());
    lab[i] = r.bernoulli(0.5) ? 1.0f : 0.0f;
  }
  EXPECT_NEAR(tape.value(video_loss(tape, tape.constant(vec(p)), lab)).item(),
              bce_oracle(p, lab, std::vector<float>(5, 1.0f)), 1e-6);
}

TEST(Compose, DefaultWeightsArithmetic) {
  LossBreakdown c;
  c.ce = c.bg_only = c.laplacian = c.cs = c.video = 1.0f;
  const LossBreakdown out = compose(c, LossWeights{});
  EXPECT_NEAR(out.foreground, 1.11f, 1e-6);
  EXPECT_NEAR(out.total, 2.555f, 1e-6);
}

TEST(Compose, ZeroWeightsLeaveVideo) {
  LossBreakdown c;
  c.ce = 3;
  c.bg_only = 4;
  c.laplacian = 5;
  c.cs = 6;
  c.video = 0.25f;
  const LossBreakdown out = compose(c, LossWeights{0, 0, 0, 0});
  EXPECT_EQ(out.total, 0.25f);
}

TEST(Compose, NonFiniteNamesComponent) {
  LossBreakdown c;
  c.cs = std::numeric_limits<float>::quiet_NaN();
  try {
    compose(c, LossWeights{});
    FAIL() << "expected NonFiniteError";
  } catch (const NonFiniteError& e) {
    EXPECT_NE(std::string(e.what()).find("L_cs"), std::string::npos);
  }
}

TEST(Weights, RejectNegative) {
  LossWeights w;
  w.gamma = -1.0f;
  EXPECT_THROW(w.validate(), ConfigError);
}
