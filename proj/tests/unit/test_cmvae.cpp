#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "../common/toyset.hpp"
#include "gatenav/cmvae/analysis.hpp"
#include "gatenav/cmvae/eval.hpp"
#include "gatenav/cmvae/model.hpp"
#include "gatenav/cmvae/train.hpp"
#include "gatenav/common/error.hpp"

using namespace gatenav;
using namespace gatenav::cmvae;

namespace {

ModelConfig small_config(ModelVariant variant) {
  ModelConfig cfg;
  cfg.variant = variant;
  cfg.latent = 8;
  cfg.image_size = 16;
  cfg.base_channels = 8;
  cfg.blocks = 2;
  return cfg;
}

Tensor random_image(int size, uint64_t seed) {
  Rng rng(seed);
  Tensor t({3, size, size});
  for (int64_t i = 0; i < t.size(); ++i) t.at(i) = static_cast<float>(rng.uniform());
  return t;
}

std::vector<scene::LabeledSample> batch_from(const scene::Dataset& ds, int64_t begin, int count) {
  std::vector<scene::LabeledSample> out;
  for (int i = 0; i < count; ++i) out.push_back(ds.sample(begin + i));
  return out;
}

}  // namespace

TEST(Model, EncodeIsDeterministic) {
  Rng rng(1);
  CmvaeModel m = CmvaeModel::create(small_config(ModelVariant::kCmvaeConstrained), rng);
  const Tensor img = random_image(16, 2);
  const auto a = m.encode(img);
  const auto b = m.encode(img);
  EXPECT_EQ(a.mu, b.mu);
  EXPECT_EQ(a.sigma, b.sigma);
}

TEST(Model, ZeroedHeadGivesZeroMu) {
  Rng rng(1);
  CmvaeModel m = CmvaeModel::create(small_config(ModelVariant::kCmvaeUnconstrained), rng);
  for (auto& e : m.store().entries()) {
    if (e.name == "enc.head.w" || e.name == "enc.head.b") e.var.value().vec().assign(e.var.value().vec().size(), 0.0f);
  }
  const auto d = m.encode(Tensor::zeros({3, 16, 16}));
  for (float v : d.mu) EXPECT_FLOAT_EQ(v, 0.0f);
}

TEST(Model, DecodeImageShapeAndBounds) {
  Rng rng(3);
  CmvaeModel m = CmvaeModel::create(small_config(ModelVariant::kVanillaVae), rng);
  std::vector<float> z(8, 0.3f);
  const Tensor img = m.decode_image(z);
  EXPECT_EQ(img.shape(), (std::vector<int>{3, 16, 16}));
  for (int64_t i = 0; i < img.size(); ++i) {
    EXPECT_GE(img.at(i), 0.0f);
    EXPECT_LE(img.at(i), 1.0f);
  }
  EXPECT_THROW(m.decode_image(std::vector<float>(5, 0.0f)), ConfigError);
}

TEST(Model, VariantRules) {
  Rng rng(4);
  CmvaeModel vae = CmvaeModel::create(small_config(ModelVariant::kVanillaVae), rng);
  EXPECT_THROW(vae.decode_pose(std::vector<float>(8, 0.0f)), ConfigError);

  CmvaeModel reg = CmvaeModel::create(small_config(ModelVariant::kRegressor), rng);
  EXPECT_THROW(reg.encode(Tensor::zeros({3, 16, 16})), ConfigError);
  const auto y = reg.regress(Tensor::zeros({3, 16, 16}));
  EXPECT_EQ(y.size(), 4u);

  ModelConfig bad = small_config(ModelVariant::kCmvaeConstrained);
  bad.latent = 3;  // constrained layout needs >= 4
  EXPECT_THROW(CmvaeModel::create(bad, rng), ConfigError);
}

TEST(Model, ConstrainedHeadsReadOnlyTheirDims) {
  Rng rng(5);
  CmvaeModel m = CmvaeModel::create(small_config(ModelVariant::kCmvaeConstrained), rng);
  std::vector<float> z(8, 0.25f);
  const auto base = m.decode_pose(z);

  // Perturbing z[4..N) leaves the decoded pose bit-identical.
  for (int d = 4; d < 8; ++d) {
    std::vector<float> zp = z;
    zp[static_cast<size_t>(d)] += 1.7f;
    const auto p = m.decode_pose(zp);
    EXPECT_EQ(p.r, base.r);
    EXPECT_EQ(p.theta, base.theta);
    EXPECT_EQ(p.phi, base.phi);
    EXPECT_EQ(p.psi, base.psi);
  }

  // The wired dims move exactly one component each: r<-z0, theta<-z1,
  // psi<-z2, phi<-z3.
  auto changed = [&](int dim) {
    std::vector<float> zp = z;
    zp[static_cast<size_t>(dim)] += 0.5f;
    const auto p = m.decode_pose(zp);
    return std::array<bool, 4>{p.r != base.r, p.theta != base.theta, p.phi != base.phi, p.psi != base.psi};
  };
  EXPECT_EQ(changed(0), (std::array<bool, 4>{true, false, false, false}));
  EXPECT_EQ(changed(1), (std::array<bool, 4>{false, true, false, false}));
  EXPECT_EQ(changed(2), (std::array<bool, 4>{false, false, false, true}));
  EXPECT_EQ(changed(3), (std::array<bool, 4>{false, false, true, false}));
}

TEST(TrainStep, UpdateRouting) {
  Rng rng(6);
  CmvaeModel m = CmvaeModel::create(small_config(ModelVariant::kCmvaeConstrained), rng);
  const scene::Dataset ds = toyset::make(16, 16, 101);
  TrainConfig cfg;
  cfg.batch_size = 8;
  Rng step_rng(7);

  const uint64_t img_dec_before = m.store().value_hash(CmvaeModel::kImageDecoderPrefix);
  const uint64_t pose_dec_before = m.store().value_hash(CmvaeModel::kPoseDecoderPrefix);
  const uint64_t enc_before = m.store().value_hash(CmvaeModel::kEncoderPrefix);

  train_step(m, batch_from(ds, 0, 8), TrainMode::kSupervised, cfg, step_rng);
  EXPECT_EQ(m.store().value_hash(CmvaeModel::kImageDecoderPrefix), img_dec_before);
  EXPECT_NE(m.store().value_hash(CmvaeModel::kPoseDecoderPrefix), pose_dec_before);
  EXPECT_NE(m.store().value_hash(CmvaeModel::kEncoderPrefix), enc_before);

  const uint64_t pose_dec_after_sup = m.store().value_hash(CmvaeModel::kPoseDecoderPrefix);
  train_step(m, batch_from(ds, 8, 8), TrainMode::kUnsupervised, cfg, step_rng);
  EXPECT_EQ(m.store().value_hash(CmvaeModel::kPoseDecoderPrefix), pose_dec_after_sup);
  EXPECT_NE(m.store().value_hash(CmvaeModel::kImageDecoderPrefix), img_dec_before);
}

TEST(TrainStep, ModeVariantRules) {
  Rng rng(8);
  CmvaeModel vae = CmvaeModel::create(small_config(ModelVariant::kVanillaVae), rng);
  CmvaeModel reg = CmvaeModel::create(small_config(ModelVariant::kRegressor), rng);
  const scene::Dataset ds = toyset::make(8, 16, 102);
  TrainConfig cfg;
  cfg.batch_size = 8;
  Rng step_rng(9);
  EXPECT_THROW(train_step(vae, batch_from(ds, 0, 8), TrainMode::kSupervised, cfg, step_rng), ConfigError);
  EXPECT_THROW(train_step(reg, batch_from(ds, 0, 8), TrainMode::kUnsupervised, cfg, step_rng), ConfigError);
  EXPECT_THROW(train_step(reg, {}, TrainMode::kSupervised, cfg, step_rng), ConfigError);
}

TEST(TrainStep, BetaZeroReducesToPureReconstruction) {
  Rng rng(10);
  CmvaeModel m = CmvaeModel::create(small_config(ModelVariant::kCmvaeUnconstrained), rng);
  const scene::Dataset ds = toyset::make(8, 16, 103);
  TrainConfig cfg;
  cfg.batch_size = 8;
  cfg.kl_beta = 0.0f;
  cfg.sample_latent = false;

  // Independent forward of the same reconstruction loss at z = mu.
  const auto batch = batch_from(ds, 0, 8);
  double expect;
  {
    nn::NoGradGuard ng;
    Tensor images({8, 3, 16, 16});
    for (int i = 0; i < 8; ++i)
      std::copy(batch[static_cast<size_t>(i)].image.vec().begin(), batch[static_cast<size_t>(i)].image.vec().end(),
                images.data() + static_cast<int64_t>(i) * 3 * 16 * 16);
    nn::Var in = nn::Var::constant(images);
    auto lat = m.encode_batch(in);
    expect = nn::mse(m.decode_image_batch(lat.mu), in).item();
  }
  Rng step_rng(11);
  const StepReport rep = train_step(m, batch, TrainMode::kUnsupervised, cfg, step_rng);
  EXPECT_EQ(rep.image_mse, expect);  // bitwise: beta = 0 and sampling off
}

TEST(Train, ZeroEpochsLeavesModelUnchanged) {
  Rng rng(12);
  CmvaeModel m = CmvaeModel::create(small_config(ModelVariant::kCmvaeConstrained), rng);
  const uint64_t before = m.store().value_hash();
  const scene::Dataset ds = toyset::make(16, 16, 104);
  TrainConfig cfg;
  cfg.epochs = 0;
  cfg.batch_size = 8;
  const TrainResult res = train(m, ds, cfg);
  EXPECT_TRUE(res.curve.empty());
  EXPECT_EQ(m.store().value_hash(), before);
}

TEST(Train, IdenticalSeedsGiveByteIdenticalCheckpoints) {
  const scene::Dataset ds = toyset::make(48, 16, 105);
  auto run = [&ds](const std::filesystem::path& out) {
    Rng rng(13);
    CmvaeModel m = CmvaeModel::create(small_config(ModelVariant::kCmvaeConstrained), rng);
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.batch_size = 8;
    cfg.seed = 21;
    train(m, ds, cfg);
    m.save(out);
  };
  const auto a = std::filesystem::temp_directory_path() / "gatenav_ckpt_a.bin";
  const auto b = std::filesystem::temp_directory_path() / "gatenav_ckpt_b.bin";
  run(a);
  run(b);
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  const std::string ba((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
  const std::string bb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
  EXPECT_EQ(ba, bb);
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}

TEST(Train, ConvergenceSmoke) {
  // 200 alternating steps on a fixed 256-sample toy set: ending loss well
  // below the starting loss.
  const scene::Dataset ds = toyset::make(256, 16, 106);
  Rng rng(14);
  ModelConfig mc = small_config(ModelVariant::kCmvaeConstrained);
  mc.norm = PoseNormalizer::from_ranges(ds.manifest().ranges);
  CmvaeModel m = CmvaeModel::create(mc, rng);
  TrainConfig cfg;
  cfg.batch_size = 32;
  Rng step_rng(15);

  double first = 0.0, last = 0.0;
  const int steps = 200;
  for (int s = 0; s < steps; ++s) {
    const int64_t at = (static_cast<int64_t>(s) * 32) % 224;
    const TrainMode mode = (s % 2 == 0) ? TrainMode::kUnsupervised : TrainMode::kSupervised;
    const StepReport rep = train_step(m, batch_from(ds, at, 32), mode, cfg, step_rng, 0.01f);
    const double loss = rep.image_mse + rep.pose_mse;
    if (s < 20) first += loss;
    if (s >= steps - 20) last += loss;
  }
  EXPECT_LT(last, 0.5 * first);
}

TEST(Eval, PerfectOracleGivesZeroError) {
  const scene::Dataset ds = toyset::make(32, 16, 107);
  const PoseErrorReport rep =
      evaluate_pose_error([](const scene::LabeledSample& s) { return s.pose; }, ds);
  for (int c = 0; c < 4; ++c) {
    EXPECT_DOUBLE_EQ(rep.mae[static_cast<size_t>(c)], 0.0);
    EXPECT_DOUBLE_EQ(rep.sem[static_cast<size_t>(c)], 0.0);
  }
}

TEST(Eval, ConstantMidpointPredictorMatchesAnalyticMae) {
  // |U - mid| over U ~ uniform[a,b] has mean (b-a)/4.
  const scene::Dataset ds = toyset::make(4000, 16, 108);
  const auto& rg = ds.manifest().ranges;
  scene::RelativeGatePose mid;
  mid.r = (rg.r_min + rg.r_max) / 2.0;
  mid.theta = 0.0;
  mid.phi = M_PI / 2.0;
  mid.psi = 0.0;
  const PoseErrorReport rep = evaluate_pose_error([&](const scene::LabeledSample&) { return mid; }, ds);
  EXPECT_NEAR(rep.mae[0], (rg.r_max - rg.r_min) / 4.0, 0.08);
  EXPECT_THROW(evaluate_pose_error([&](const scene::LabeledSample&) { return mid; },
                                   toyset::make(0, 16, 1)),
               DataError);
}

TEST(Eval, CheckpointRoundTripReproducesErrorsBitwise) {
  const scene::Dataset ds = toyset::make(64, 16, 109);
  Rng rng(16);
  ModelConfig mc = small_config(ModelVariant::kRegressor);
  mc.norm = PoseNormalizer::from_ranges(ds.manifest().ranges);
  CmvaeModel m = CmvaeModel::create(mc, rng);
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.batch_size = 16;
  train(m, ds, cfg);
  const PoseErrorReport before = evaluate_pose_error(m, ds);

  const auto path = std::filesystem::temp_directory_path() / "gatenav_eval_ckpt.bin";
  m.save(path);
  const CmvaeModel loaded = CmvaeModel::load(path);
  const PoseErrorReport after = evaluate_pose_error(loaded, ds);
  for (int c = 0; c < 4; ++c) {
    EXPECT_EQ(before.mae[static_cast<size_t>(c)], after.mae[static_cast<size_t>(c)]);
    EXPECT_EQ(before.sem[static_cast<size_t>(c)], after.sem[static_cast<size_t>(c)]);
  }
  std::filesystem::remove(path);
}

TEST(Analysis, InterpolationEndpointsAndMidpoint) {
  Rng rng(17);
  CmvaeModel m = CmvaeModel::create(small_config(ModelVariant::kCmvaeConstrained), rng);
  const Tensor a = random_image(16, 18);
  const Tensor b = random_image(16, 19);
  const auto steps = interpolate(m, a, b, 3);
  ASSERT_EQ(steps.size(), 3u);

  const auto mu_a = m.encode(a).mu;
  const auto mu_b = m.encode(b).mu;
  EXPECT_EQ(steps[0].z, mu_a);
  const Tensor direct = m.decode_image(mu_a);
  for (int64_t i = 0; i < direct.size(); ++i) EXPECT_EQ(steps[0].image.at(i), direct.at(i));
  for (size_t i = 0; i < mu_a.size(); ++i)
    EXPECT_FLOAT_EQ(steps[1].z[i], 0.5f * (mu_a[i] + mu_b[i]));

  EXPECT_THROW(interpolate(m, a, b, 1), ConfigError);
}

TEST(Analysis, TraversalHeadWiring) {
  Rng rng(20);
  CmvaeModel m = CmvaeModel::create(small_config(ModelVariant::kCmvaeConstrained), rng);
  const Tensor base = random_image(16, 21);

  const auto dim0 = latent_traversal(m, base, 0, 1.5f, 5);
  ASSERT_EQ(dim0.size(), 5u);
  bool r_varies = false;
  for (size_t k = 1; k < dim0.size(); ++k) {
    r_varies = r_varies || dim0[k].pose.r != dim0[0].pose.r;
    EXPECT_EQ(dim0[k].pose.theta, dim0[0].pose.theta);
    EXPECT_EQ(dim0[k].pose.phi, dim0[0].pose.phi);
    EXPECT_EQ(dim0[k].pose.psi, dim0[0].pose.psi);
  }
  EXPECT_TRUE(r_varies);

  const auto dim5 = latent_traversal(m, base, 5, 1.5f, 5);
  for (size_t k = 1; k < dim5.size(); ++k) {
    EXPECT_EQ(dim5[k].pose.r, dim5[0].pose.r);
    EXPECT_EQ(dim5[k].pose.theta, dim5[0].pose.theta);
    EXPECT_EQ(dim5[k].pose.phi, dim5[0].pose.phi);
    EXPECT_EQ(dim5[k].pose.psi, dim5[0].pose.psi);
  }
  // Images still respond to the swept dim (full latent feeds the decoder).
  EXPECT_EQ(dim5[0].image.shape(), (std::vector<int>{3, 16, 16}));
  EXPECT_THROW(latent_traversal(m, base, 8, 1.0f, 5), ConfigError);
}
