#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "../common/oracles.hpp"
#include "gatenav/common/error.hpp"
#include "gatenav/numerics/checkpoint.hpp"
#include "gatenav/numerics/gaussian.hpp"
#include "gatenav/numerics/ops.hpp"

using namespace gatenav;
using nn::Var;

TEST(Adam, ZeroGradientLeavesParametersUnchanged) {
  nn::ParameterStore store;
  Var w = store.create("w", Tensor({2}, {1.5f, -0.5f}));
  store.adam_step(nn::AdamConfig{});
  EXPECT_FLOAT_EQ(w.value().at(0), 1.5f);
  EXPECT_FLOAT_EQ(w.value().at(1), -0.5f);
}

TEST(Adam, FirstStepMatchesHandEvaluation) {
  // t=1: m_hat = g, v_hat = g^2, delta = lr * g/(|g| + eps) ~= lr.
  nn::ParameterStore store;
  Var w = store.create("w", Tensor::scalar(1.0f));
  w.value().grad()[0] = 1.0f;
  nn::AdamConfig cfg;
  cfg.lr = 0.1f;
  store.adam_step(cfg);
  EXPECT_NEAR(w.value().at(0), 1.0f - 0.1f / (1.0f + 1e-8f), 1e-6);
}

TEST(Adam, ConstantGradientApproachesSignedLr) {
  nn::ParameterStore store;
  Var w = store.create("w", Tensor::scalar(0.0f));
  nn::AdamConfig cfg;
  cfg.lr = 0.01f;
  float prev = 0.0f;
  float step_size = 0.0f;
  for (int t = 0; t < 400; ++t) {
    w.value().grad()[0] = -2.5f;  // constant negative gradient
    store.adam_step(cfg);
    step_size = w.value().at(0) - prev;
    prev = w.value().at(0);
  }
  // Fixed point of the Adam recurrences: step -> lr * sign(g).
  EXPECT_NEAR(step_size, cfg.lr, 1e-4);
}

TEST(Adam, PrefixRoutingTouchesOnlySelectedGroups) {
  nn::ParameterStore store;
  Var a = store.create("enc.w", Tensor::scalar(1.0f));
  Var b = store.create("dec.w", Tensor::scalar(1.0f));
  a.value().grad()[0] = 1.0f;
  b.value().grad()[0] = 1.0f;
  const uint64_t dec_before = store.value_hash("dec.");
  store.adam_step(nn::AdamConfig{}, {"enc."});
  EXPECT_NE(store.value_hash("enc."), store.value_hash("dec."));
  EXPECT_EQ(store.value_hash("dec."), dec_before);
  // All grads zeroed afterwards.
  EXPECT_FLOAT_EQ(a.value().grad()[0], 0.0f);
  EXPECT_FLOAT_EQ(b.value().grad()[0], 0.0f);
}

TEST(GaussianKl, PriorEqualsPosteriorIsZero) {
  nn::LatentDistribution d;
  d.mu.assign(6, 0.0f);
  d.sigma.assign(6, 1.0f);
  EXPECT_NEAR(nn::gaussian_kl(d), 0.0, 1e-9);
}

TEST(GaussianKl, ClosedFormHalf) {
  nn::LatentDistribution d;
  d.mu = {1.0f};
  d.sigma = {1.0f};
  EXPECT_NEAR(nn::gaussian_kl(d), 0.5, 1e-7);
}

TEST(GaussianKl, MatchesQuadratureOracle) {
  nn::LatentDistribution d;
  d.mu = {0.3f};
  d.sigma = {0.7f};
  EXPECT_NEAR(nn::gaussian_kl(d), oracles::kl_quadrature(0.3, 0.7), 1e-5);
}

TEST(GaussianKl, NonPositiveSigmaIsDomainError) {
  nn::LatentDistribution d;
  d.mu = {0.0f};
  d.sigma = {0.0f};
  EXPECT_THROW(nn::gaussian_kl(d), DataError);
}

TEST(GaussianKl, NonNegativeWithEqualityOnlyAtPrior) {
  Rng rng(99);
  for (int i = 0; i < 200; ++i) {
    nn::LatentDistribution d;
    d.mu = {static_cast<float>(rng.uniform(-3, 3))};
    d.sigma = {static_cast<float>(std::exp(rng.uniform(-2, 2)))};
    const double kl = nn::gaussian_kl(d);
    EXPECT_GE(kl, 0.0);
    if (std::abs(d.mu[0]) > 1e-3 || std::abs(d.sigma[0] - 1.0f) > 1e-3) EXPECT_GT(kl, 0.0);
  }
}

TEST(Reparameterize, SigmaFloorReturnsMu) {
  // logvar at the clamp floor: z ~= mu to within exp(-5) * |eps|.
  Rng rng(3);
  Var mu = Var::constant(Tensor({1, 4}, {0.5f, -1.0f, 2.0f, 0.0f}));
  Var lv = Var::constant(Tensor::full({1, 4}, -30.0f));  // clamped to -10
  Var z = nn::reparameterize(mu, lv, rng);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(z.value().at(i), mu.value().at(i), 5e-2);
}

TEST(Reparameterize, FixedSeedIsDeterministic) {
  Var mu = Var::constant(Tensor::zeros({1, 8}));
  Var lv = Var::constant(Tensor::zeros({1, 8}));
  Rng r1(42, 7), r2(42, 7);
  Var z1 = nn::reparameterize(mu, lv, r1);
  Var z2 = nn::reparameterize(mu, lv, r2);
  for (int i = 0; i < 8; ++i) EXPECT_FLOAT_EQ(z1.value().at(i), z2.value().at(i));
}

TEST(Reparameterize, LawOfLargeNumbers) {
  Rng rng(1234);
  Var mu = Var::constant(Tensor::full({1, 1}, 2.0f));
  Var lv = Var::constant(Tensor::zeros({1, 1}));  // sigma = 1
  double acc = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) acc += nn::reparameterize(mu, lv, rng).value().at(0);
  EXPECT_NEAR(acc / n, 2.0, 0.02);
}

TEST(Checkpoint, RoundTripIsBitIdentical) {
  Rng rng(5);
  nn::ParameterStore store;
  store.create("layer.w", oracles::random_tensor({3, 4}, rng));
  store.create("layer.b", oracles::random_tensor({4}, rng));
  // Dirty the Adam state so moments round-trip too.
  store.entries()[0].var.value().grad()[0] = 0.5f;
  store.adam_step(nn::AdamConfig{});

  const auto path = std::filesystem::temp_directory_path() / "gatenav_test_ckpt.bin";
  nn::save_checkpoint(path, nn::store_to_tensors(store));

  nn::ParameterStore loaded;
  Rng rng2(5);
  loaded.create("layer.w", oracles::random_tensor({3, 4}, rng2));
  loaded.create("layer.b", oracles::random_tensor({4}, rng2));
  // Overwrite with different values first to prove the load happens.
  loaded.entries()[0].var.value().vec().assign(12, 0.0f);
  nn::tensors_to_store(nn::load_checkpoint(path), loaded);

  EXPECT_EQ(store.value_hash(), loaded.value_hash());
  EXPECT_EQ(store.entries()[0].t, loaded.entries()[0].t);
  EXPECT_EQ(store.entries()[0].m, loaded.entries()[0].m);
  EXPECT_EQ(store.entries()[0].v, loaded.entries()[0].v);
  std::filesystem::remove(path);
}

TEST(Checkpoint, TruncatedFileIsDataError) {
  const auto path = std::filesystem::temp_directory_path() / "gatenav_test_trunc.bin";
  nn::save_checkpoint(path, {{"w", Tensor({4}, {1, 2, 3, 4})}});
  const auto size = std::filesystem::file_size(path);
  std::filesystem::resize_file(path, size - 6);
  EXPECT_THROW(nn::load_checkpoint(path), DataError);
  std::filesystem::remove(path);
}

TEST(Checkpoint, MagicHeaderLayout) {
  const auto path = std::filesystem::temp_directory_path() / "gatenav_test_magic.bin";
  nn::save_checkpoint(path, {{"ab", Tensor({2}, {1.0f, 2.0f})}});
  std::ifstream is(path, std::ios::binary);
  char magic[4];
  is.read(magic, 4);
  EXPECT_EQ(std::string(magic, 4), "CMVK");
  uint32_t version = 0, count = 0;
  is.read(reinterpret_cast<char*>(&version), 4);
  is.read(reinterpret_cast<char*>(&count), 4);
  EXPECT_EQ(version, 1u);
  EXPECT_EQ(count, 1u);
  uint16_t name_len = 0;
  is.read(reinterpret_cast<char*>(&name_len), 2);
  EXPECT_EQ(name_len, 2u);
  char name[2];
  is.read(name, 2);
  EXPECT_EQ(std::string(name, 2), "ab");
  uint8_t rank = 0;
  is.read(reinterpret_cast<char*>(&rank), 1);
  EXPECT_EQ(rank, 1u);
  uint32_t dim = 0;
  is.read(reinterpret_cast<char*>(&dim), 4);
  EXPECT_EQ(dim, 2u);
  float values[2];
  is.read(reinterpret_cast<char*>(values), 8);
  EXPECT_FLOAT_EQ(values[0], 1.0f);
  EXPECT_FLOAT_EQ(values[1], 2.0f);
  std::filesystem::remove(path);
}

TEST(Rng, SameSeedStreamIdenticalSequence) {
  Rng a(42, 3), b(42, 3);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
  Rng c(42, 4);
  bool different = false;
  Rng a2(42, 3);
  for (int i = 0; i < 100; ++i) different = different || (a2.next_u64() != c.next_u64());
  EXPECT_TRUE(different);
}

TEST(Rng, ForkIsIndependentOfParentUse) {
  Rng a(7, 1);
  Rng fork_before = a.fork(5);
  a.next_u64();
  Rng fork_after = a.fork(5);
  EXPECT_EQ(fork_before.next_u64(), fork_after.next_u64());
}
