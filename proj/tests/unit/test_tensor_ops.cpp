#include <gtest/gtest.h>

#include "../common/oracles.hpp"
#include "gatenav/common/error.hpp"
#include "gatenav/numerics/ops.hpp"

using namespace gatenav;
using nn::Var;

TEST(Dense, IdentityWeights) {
  Var x = Var::constant(Tensor({1, 2}, {1.0f, 2.0f}));
  Var w = Var::constant(Tensor({2, 2}, {1.0f, 0.0f, 0.0f, 1.0f}));
  Var b = Var::constant(Tensor({2}, {0.0f, 0.0f}));
  Var y = nn::dense(x, w, b);
  EXPECT_FLOAT_EQ(y.value().at(0), 1.0f);
  EXPECT_FLOAT_EQ(y.value().at(1), 2.0f);
}

TEST(Dense, BiasShift) {
  Var x = Var::constant(Tensor({1, 2}, {1.0f, 1.0f}));
  Var w = Var::constant(Tensor({2, 2}, {1.0f, 0.0f, 0.0f, 1.0f}));
  Var b = Var::constant(Tensor({2}, {3.0f, 4.0f}));
  Var y = nn::dense(x, w, b);
  EXPECT_FLOAT_EQ(y.value().at(0), 4.0f);
  EXPECT_FLOAT_EQ(y.value().at(1), 5.0f);
}

TEST(Dense, MatchesNaiveMatmul) {
  Rng rng(42);
  Tensor x = oracles::random_tensor({2, 3}, rng);
  Tensor w = oracles::random_tensor({3, 2}, rng);
  const auto expect = oracles::matmul_naive(x.vec(), w.vec(), 2, 3, 2);
  Var y = nn::dense(Var::constant(x), Var::constant(w), Var::constant(Tensor::zeros({2})));
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(y.value().at(i), expect[static_cast<size_t>(i)], 1e-5);
}

TEST(Dense, ShapeMismatchThrows) {
  Var x = Var::constant(Tensor::zeros({1, 3}));
  Var w = Var::constant(Tensor::zeros({2, 2}));
  Var b = Var::constant(Tensor::zeros({2}));
  EXPECT_THROW(nn::dense(x, w, b), ConfigError);
}

TEST(Conv2d, IdentityKernel) {
  Rng rng(1);
  Tensor x = oracles::random_tensor({1, 1, 4, 4}, rng);
  Var y = nn::conv2d(Var::constant(x), Var::constant(Tensor({1, 1, 1, 1}, {1.0f})), 1, 0);
  ASSERT_EQ(y.shape(), (std::vector<int>{1, 1, 4, 4}));
  for (int i = 0; i < 16; ++i) EXPECT_FLOAT_EQ(y.value().at(i), x.at(i));
}

TEST(Conv2d, ConstantField) {
  Var x = Var::constant(Tensor::full({1, 1, 5, 5}, 1.0f));
  Var k = Var::constant(Tensor::full({1, 1, 3, 3}, 1.0f));
  Var y = nn::conv2d(x, k, 1, 0);
  ASSERT_EQ(y.shape(), (std::vector<int>{1, 1, 3, 3}));
  for (int i = 0; i < 9; ++i) EXPECT_FLOAT_EQ(y.value().at(i), 9.0f);
}

TEST(Conv2d, MatchesDirectSummationOracle) {
  Rng rng(7);
  Tensor x = oracles::random_tensor({1, 2, 6, 6}, rng);
  Tensor k = oracles::random_tensor({3, 2, 3, 3}, rng);
  Var y = nn::conv2d(Var::constant(x), Var::constant(k), 2, 1);
  const int out_h = (6 + 2 - 3) / 2 + 1;
  ASSERT_EQ(y.shape(), (std::vector<int>{1, 3, out_h, out_h}));
  const auto expect = oracles::conv2d_naive(x.vec(), k.vec(), 2, 6, 6, 3, 3, 2, 1, out_h, out_h);
  for (int64_t i = 0; i < y.value().size(); ++i) EXPECT_NEAR(y.value().at(i), expect[static_cast<size_t>(i)], 1e-5);
}

TEST(Conv2d, NonPositiveOutputExtentThrows) {
  Var x = Var::constant(Tensor::zeros({1, 1, 2, 2}));
  Var k = Var::constant(Tensor::zeros({1, 1, 5, 5}));
  EXPECT_THROW(nn::conv2d(x, k, 1, 0), ConfigError);
}

TEST(TransposeConv2d, UnitKernelIdentity) {
  Rng rng(5);
  Tensor x = oracles::random_tensor({1, 1, 3, 3}, rng);
  Var y = nn::transpose_conv2d(Var::constant(x), Var::constant(Tensor({1, 1, 1, 1}, {1.0f})), 1, 0);
  ASSERT_EQ(y.shape(), (std::vector<int>{1, 1, 3, 3}));
  for (int i = 0; i < 9; ++i) EXPECT_FLOAT_EQ(y.value().at(i), x.at(i));
}

TEST(TransposeConv2d, ImpulseScatter) {
  // 2x2 ones input, 2x2 kernel with a single impulse, stride 2 -> 4x4 output
  // with ones at the four impulse positions.
  Var x = Var::constant(Tensor::full({1, 1, 2, 2}, 1.0f));
  Tensor k = Tensor::zeros({1, 1, 2, 2});
  k.at(0) = 1.0f;  // impulse at (0, 0)
  Var y = nn::transpose_conv2d(x, Var::constant(k), 2, 0);
  ASSERT_EQ(y.shape(), (std::vector<int>{1, 1, 4, 4}));
  int ones = 0;
  for (int yy = 0; yy < 4; ++yy)
    for (int xx = 0; xx < 4; ++xx) {
      const float v = y.value().at(yy * 4 + xx);
      if (yy % 2 == 0 && xx % 2 == 0) {
        EXPECT_FLOAT_EQ(v, 1.0f);
        ++ones;
      } else {
        EXPECT_FLOAT_EQ(v, 0.0f);
      }
    }
  EXPECT_EQ(ones, 4);
}

TEST(TransposeConv2d, MatchesScatterAddOracle) {
  Rng rng(11);
  Tensor x = oracles::random_tensor({1, 3, 4, 4}, rng);
  Tensor k = oracles::random_tensor({3, 2, 4, 4}, rng);
  Var y = nn::transpose_conv2d(Var::constant(x), Var::constant(k), 2, 1);
  const int out = (4 - 1) * 2 - 2 + 4;
  ASSERT_EQ(y.shape(), (std::vector<int>{1, 2, out, out}));
  const auto expect = oracles::tconv2d_naive(x.vec(), k.vec(), 3, 4, 4, 2, 4, 2, 1, out, out);
  for (int64_t i = 0; i < y.value().size(); ++i) EXPECT_NEAR(y.value().at(i), expect[static_cast<size_t>(i)], 1e-5);
}

TEST(TransposeConv2d, AdjointIdentity) {
  // <conv(x,k), y> == <x, tconv(y,k)> with tconv kernel axes [C x F x k x k].
  Rng rng(13);
  for (int trial = 0; trial < 8; ++trial) {
    Rng sub = rng.fork(static_cast<uint64_t>(trial));
    const int stride = 1 + static_cast<int>(sub.uniform_index(2));
    const int pad = static_cast<int>(sub.uniform_index(2));
    const int h = 5 + static_cast<int>(sub.uniform_index(3));
    const int ch = 1 + static_cast<int>(sub.uniform_index(2));
    const int f = 1 + static_cast<int>(sub.uniform_index(3));
    const int k = 3;
    if (h + 2 * pad < k) continue;
    Tensor x = oracles::random_tensor({1, ch, h, h}, sub);
    Tensor kern = oracles::random_tensor({f, ch, k, k}, sub);
    Var conv = nn::conv2d(Var::constant(x), Var::constant(kern), stride, pad);
    const int oh = conv.shape()[2];
    Tensor yr = oracles::random_tensor({1, f, oh, oh}, sub);

    double lhs = 0.0;
    for (int64_t i = 0; i < conv.value().size(); ++i)
      lhs += static_cast<double>(conv.value().at(i)) * yr.at(i);

    // The same kernel tensor: its leading axis matches the y-side channels,
    // so conv2d's input adjoint is transpose_conv2d with the kernel as-is.
    Var back = nn::transpose_conv2d(Var::constant(yr), Var::constant(kern), stride, pad);
    ASSERT_EQ(back.shape(), (std::vector<int>{1, ch, h, h}));
    double rhs = 0.0;
    for (int64_t i = 0; i < back.value().size(); ++i)
      rhs += static_cast<double>(back.value().at(i)) * x.at(i);

    EXPECT_NEAR(lhs, rhs, 1e-5 * std::max(1.0, std::abs(lhs)));
  }
}

TEST(Activations, PointValues) {
  Var x = Var::constant(Tensor({3}, {-1.0f, 0.0f, 2.0f}));
  Var r = nn::relu(x);
  EXPECT_FLOAT_EQ(r.value().at(0), 0.0f);
  EXPECT_FLOAT_EQ(r.value().at(1), 0.0f);
  EXPECT_FLOAT_EQ(r.value().at(2), 2.0f);

  EXPECT_FLOAT_EQ(nn::tanh_act(Var::constant(Tensor::scalar(0.0f))).value().at(0), 0.0f);
  EXPECT_FLOAT_EQ(nn::leaky_relu(Var::constant(Tensor::scalar(-2.0f))).value().at(0), -0.02f);
  EXPECT_FLOAT_EQ(nn::sigmoid(Var::constant(Tensor::scalar(0.0f))).value().at(0), 0.5f);
}

TEST(Tensor, NonFiniteIsHardError) {
  Tensor t({2}, {1.0f, std::numeric_limits<float>::infinity()});
  EXPECT_THROW(t.check_finite("test"), NumericsError);
  // Ops run the check on their outputs.
  Var big = Var::constant(Tensor({1}, {3e38f}));
  EXPECT_THROW(nn::mul(big, big), NumericsError);
}

TEST(Tensor, ShapeDataInvariant) {
  EXPECT_THROW(Tensor({2, 3}, {1.0f}), NumericsError);
  EXPECT_THROW(Tensor({0}), NumericsError);
}
