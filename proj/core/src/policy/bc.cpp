#include "gatenav/policy/bc.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "gatenav/cmvae/train.hpp"
#include "gatenav/common/error.hpp"

namespace gatenav::policy {

using nn::Var;

std::string policy_name(PolicyVariant v) {
  switch (v) {
    case PolicyVariant::kCon:
      return "con";
    case PolicyVariant::kUnc:
      return "unc";
    case PolicyVariant::kImg:
      return "img";
    case PolicyVariant::kReg:
      return "reg";
    case PolicyVariant::kFull:
      return "full";
  }
  throw ConfigError("unknown policy variant");
}

PolicyVariant policy_from_name(const std::string& name) {
  if (name == "con") return PolicyVariant::kCon;
  if (name == "unc") return PolicyVariant::kUnc;
  if (name == "img") return PolicyVariant::kImg;
  if (name == "reg") return PolicyVariant::kReg;
  if (name == "full") return PolicyVariant::kFull;
  throw ConfigError("unknown policy variant: " + name);
}

std::optional<cmvae::ModelVariant> required_feature_variant(PolicyVariant v) {
  switch (v) {
    case PolicyVariant::kCon:
      return cmvae::ModelVariant::kCmvaeConstrained;
    case PolicyVariant::kUnc:
      return cmvae::ModelVariant::kCmvaeUnconstrained;
    case PolicyVariant::kImg:
      return cmvae::ModelVariant::kVanillaVae;
    case PolicyVariant::kReg:
      return cmvae::ModelVariant::kRegressor;
    case PolicyVariant::kFull:
      return std::nullopt;
  }
  return std::nullopt;
}

std::vector<float> featurize(PolicyVariant variant, const cmvae::CmvaeModel& feature_model, const Tensor& image) {
  const auto required = required_feature_variant(variant);
  if (!required) throw ConfigError("featurize: BC_full has no separate feature step");
  if (feature_model.config().variant != *required)
    throw ConfigError("featurize: policy '" + policy_name(variant) + "' expects feature model '" +
                      cmvae::variant_name(*required) + "', got '" +
                      cmvae::variant_name(feature_model.config().variant) + "'");
  if (variant == PolicyVariant::kReg) {
    const auto y = feature_model.regress(image);
    return {y[0], y[1], y[2], y[3]};
  }
  return feature_model.encode(image).mu;
}

BcPolicy BcPolicy::create(PolicyVariant variant, const BcConfig& cfg, Rng& rng) {
  if (cfg.feature_dim < 4) throw ConfigError("bc: feature_dim must be >= 4");
  BcPolicy p;
  p.variant_ = variant;
  p.cfg_ = cfg;
  if (variant == PolicyVariant::kFull) {
    cmvae::build_encoder_params(p.store_, "enc.", cfg.encoder, rng);
    p.store_.create("enc.head.w", nn::kaiming_uniform({cfg.encoder.flat_width(), cfg.feature_dim},
                                                      cfg.encoder.flat_width(), rng));
    p.store_.create("enc.head.b", Tensor::zeros({cfg.feature_dim}));
  }
  auto dense_param = [&](const std::string& name, int in, int out) {
    p.store_.create(name + ".w", nn::kaiming_uniform({in, out}, in, rng));
    p.store_.create(name + ".b", Tensor::zeros({out}));
  };
  dense_param("head.fc1", cfg.feature_dim, cfg.hidden1);
  dense_param("head.fc2", cfg.hidden1, cfg.hidden2);
  dense_param("head.fc3", cfg.hidden2, 4);
  return p;
}

int64_t BcPolicy::head_parameter_count() const {
  int64_t n = 0;
  for (const auto& e : store_.entries())
    if (e.name.rfind("head.", 0) == 0) n += e.var.value().size();
  return n;
}

Var BcPolicy::head_forward(const Var& features) const {
  Var h = nn::leaky_relu(nn::dense(features, store_.get("head.fc1.w"), store_.get("head.fc1.b")));
  h = nn::leaky_relu(nn::dense(h, store_.get("head.fc2.w"), store_.get("head.fc2.b")));
  return nn::tanh_act(nn::dense(h, store_.get("head.fc3.w"), store_.get("head.fc3.b")));
}

Var BcPolicy::full_forward(const Var& images) const {
  if (variant_ != PolicyVariant::kFull) throw ConfigError("full_forward: policy is not BC_full");
  Var flat = cmvae::encoder_forward(store_, "enc.", cfg_.encoder, images);
  Var features = nn::dense(flat, store_.get("enc.head.w"), store_.get("enc.head.b"));
  return head_forward(features);
}

namespace {

// kReg features are length 4; zero-pad so every head shares one input width.
std::vector<float> pad_features(std::vector<float> f, int width) {
  if (static_cast<int>(f.size()) > width)
    throw ConfigError("bc: feature length " + std::to_string(f.size()) + " exceeds head width " +
                      std::to_string(width));
  f.resize(static_cast<size_t>(width), 0.0f);
  return f;
}

}  // namespace

VelocityCommand BcPolicy::act(const cmvae::CmvaeModel* feature_model, const Tensor& image) const {
  nn::NoGradGuard ng;
  Tensor out;
  if (variant_ == PolicyVariant::kFull) {
    Var batch = Var::constant(Tensor({1, 3, cfg_.encoder.image_size, cfg_.encoder.image_size}, image.vec()), "image");
    out = full_forward(batch).value();
  } else {
    if (!feature_model) throw ConfigError("act: frozen policy needs its feature model");
    std::vector<float> f = pad_features(featurize(variant_, *feature_model, image), cfg_.feature_dim);
    Var features = Var::constant(Tensor({1, cfg_.feature_dim}, std::move(f)), "features");
    out = head_forward(features).value();
  }
  return denormalize_command({out.at(0), out.at(1), out.at(2), out.at(3)}, cfg_.limits);
}

VelocityCommand BcAgent::act(const sim::AgentContext& ctx) {
  if (!ctx.image) throw ConfigError("BcAgent: rollout provided no image");
  return policy_.act(feature_model_, *ctx.image);
}

namespace {

struct FeatureTable {
  std::vector<float> rows;  // n x dim
  int dim = 0;
};

FeatureTable cache_features(PolicyVariant variant, const cmvae::CmvaeModel& model, const expert::DemoDataset& demos,
                            int width) {
  nn::NoGradGuard ng;
  const auto& mc = model.config();
  const int64_t n = demos.size();
  FeatureTable table;
  table.dim = width;
  table.rows.assign(static_cast<size_t>(n) * width, 0.0f);
  constexpr int kBatch = 128;
  const int64_t stride = 3LL * mc.image_size * mc.image_size;
  for (int64_t at = 0; at < n; at += kBatch) {
    const int count = static_cast<int>(std::min<int64_t>(kBatch, n - at));
    Tensor images({count, 3, mc.image_size, mc.image_size});
    for (int i = 0; i < count; ++i) demos.write_image(at + i, images.data() + i * stride);
    Var in = Var::constant(std::move(images), "demo_images");
    const Tensor feats = variant == PolicyVariant::kReg ? model.regress_batch(in).value()
                                                        : model.encode_batch(in).mu.value();
    const int fdim = feats.shape()[1];
    for (int i = 0; i < count; ++i)
      for (int d = 0; d < fdim; ++d)
        table.rows[static_cast<size_t>(at + i) * width + d] = feats.at(static_cast<int64_t>(i) * fdim + d);
  }
  return table;
}

}  // namespace

std::vector<BcEpochLoss> bc_train(BcPolicy& policy, const cmvae::CmvaeModel* feature_model,
                                  const expert::DemoDataset& demos, const BcTrainConfig& cfg) {
  if (demos.size() == 0) throw DataError("bc_train: empty demo dataset");
  const PolicyVariant variant = policy.variant();
  const bool full = variant == PolicyVariant::kFull;
  if (!full) {
    if (!feature_model) throw ConfigError("bc_train: frozen policy needs a trained feature checkpoint");
    const auto required = required_feature_variant(variant);
    if (feature_model->config().variant != *required)
      throw ConfigError("bc_train: policy '" + policy_name(variant) + "' expects feature model '" +
                        cmvae::variant_name(*required) + "'");
  }

  const int width = policy.config().feature_dim;
  FeatureTable features;
  if (!full) features = cache_features(variant, *feature_model, demos, width);

  cmvae::SplitIndices split = cmvae::dataset_split(demos.size(), cfg.val_frac, cfg.seed);
  if (static_cast<int>(split.train.size()) < cfg.batch_size)
    throw ConfigError("bc_train: training split smaller than one batch");

  Rng rng(cfg.seed, 0x6263);  // dedicated BC stream
  const nn::AdamConfig adam{cfg.lr, 0.9f, 0.999f, 1e-8f};
  const int64_t steps_per_epoch = static_cast<int64_t>(split.train.size()) / cfg.batch_size;
  const int image_size = full ? policy.config().encoder.image_size : 0;
  const int64_t img_stride = 3LL * image_size * image_size;

  auto make_inputs = [&](const std::vector<int64_t>& idx, size_t begin, size_t count) {
    Tensor targets({static_cast<int>(count), 4});
    for (size_t i = 0; i < count; ++i) {
      const auto& a = demos.action(idx[begin + i]);
      for (int c = 0; c < 4; ++c) targets.at(static_cast<int64_t>(i) * 4 + c) = a[static_cast<size_t>(c)];
    }
    Tensor inputs;
    if (full) {
      inputs = Tensor({static_cast<int>(count), 3, image_size, image_size});
      for (size_t i = 0; i < count; ++i)
        demos.write_image(idx[begin + i], inputs.data() + static_cast<int64_t>(i) * img_stride);
    } else {
      inputs = Tensor({static_cast<int>(count), width});
      for (size_t i = 0; i < count; ++i)
        std::copy_n(features.rows.begin() + static_cast<int64_t>(idx[begin + i]) * width, width,
                    inputs.data() + static_cast<int64_t>(i) * width);
    }
    return std::pair<Tensor, Tensor>{std::move(inputs), std::move(targets)};
  };

  auto forward = [&](Tensor inputs) {
    Var in = Var::constant(std::move(inputs), "bc_inputs");
    return full ? policy.full_forward(in) : policy.head_forward(in);
  };

  std::vector<BcEpochLoss> curve;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    try {
      for (int64_t i = static_cast<int64_t>(split.train.size()) - 1; i > 0; --i)
        std::swap(split.train[static_cast<size_t>(i)], split.train[rng.uniform_index(static_cast<uint64_t>(i + 1))]);

      double acc = 0.0;
      for (int64_t s = 0; s < steps_per_epoch; ++s) {
        auto [inputs, targets] = make_inputs(split.train, static_cast<size_t>(s) * cfg.batch_size,
                                             static_cast<size_t>(cfg.batch_size));
        Var loss = nn::mse(forward(std::move(inputs)), Var::constant(std::move(targets), "bc_targets"));
        acc += loss.item();
        nn::backward(loss);
        policy.store().adam_step(adam);  // head only, plus encoder for kFull
      }
      curve.push_back({epoch, "train", acc / static_cast<double>(steps_per_epoch)});

      // Validation.
      nn::NoGradGuard ng;
      double val_acc = 0.0;
      int64_t seen = 0;
      for (size_t at = 0; at < split.val.size(); at += static_cast<size_t>(cfg.batch_size)) {
        const size_t count = std::min(static_cast<size_t>(cfg.batch_size), split.val.size() - at);
        auto [inputs, targets] = make_inputs(split.val, at, count);
        val_acc +=
            static_cast<double>(count) *
            nn::mse(forward(std::move(inputs)), Var::constant(std::move(targets), "bc_targets")).item();
        seen += static_cast<int64_t>(count);
      }
      curve.push_back({epoch, "val", seen ? val_acc / static_cast<double>(seen) : 0.0});
    } catch (const NumericsError& e) {
      throw TrainError("behavior cloning diverged at epoch " + std::to_string(epoch) + ": " + e.what());
    }
  }
  return curve;
}

void write_bc_curve_csv(const std::filesystem::path& path, const std::vector<BcEpochLoss>& curve) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw DataError("cannot open for writing: " + path.string());
  os << "epoch,split,action_mse\n";
  char line[128];
  for (const auto& row : curve) {
    std::snprintf(line, sizeof(line), "%d,%s,%.9g\n", row.epoch, row.split.c_str(), row.action_mse);
    os << line;
  }
}

void BcPolicy::save(const std::filesystem::path& path) const {
  std::vector<nn::NamedTensor> tensors = nn::store_to_tensors(store_);
  tensors.push_back({"__meta.policy_variant", Tensor::scalar(static_cast<float>(static_cast<int>(variant_)))});
  tensors.push_back({"__meta.feature_dim", Tensor::scalar(static_cast<float>(cfg_.feature_dim))});
  tensors.push_back({"__meta.hidden1", Tensor::scalar(static_cast<float>(cfg_.hidden1))});
  tensors.push_back({"__meta.hidden2", Tensor::scalar(static_cast<float>(cfg_.hidden2))});
  tensors.push_back({"__meta.v_max", Tensor::scalar(static_cast<float>(cfg_.limits.v_max))});
  tensors.push_back({"__meta.omega_max", Tensor::scalar(static_cast<float>(cfg_.limits.omega_max))});
  tensors.push_back({"__meta.enc_image", Tensor::scalar(static_cast<float>(cfg_.encoder.image_size))});
  tensors.push_back({"__meta.enc_base", Tensor::scalar(static_cast<float>(cfg_.encoder.base_channels))});
  tensors.push_back({"__meta.enc_blocks", Tensor::scalar(static_cast<float>(cfg_.encoder.blocks))});
  nn::save_checkpoint(path, tensors);
}

BcPolicy BcPolicy::load(const std::filesystem::path& path) {
  const std::vector<nn::NamedTensor> tensors = nn::load_checkpoint(path);
  auto meta = [&tensors, &path](const std::string& name) -> float {
    for (const auto& nt : tensors)
      if (nt.name == name) return nt.tensor.at(0);
    throw DataError("checkpoint " + path.string() + " is missing " + name);
  };
  BcConfig cfg;
  cfg.feature_dim = static_cast<int>(meta("__meta.feature_dim"));
  cfg.hidden1 = static_cast<int>(meta("__meta.hidden1"));
  cfg.hidden2 = static_cast<int>(meta("__meta.hidden2"));
  cfg.limits.v_max = meta("__meta.v_max");
  cfg.limits.omega_max = meta("__meta.omega_max");
  cfg.encoder.image_size = static_cast<int>(meta("__meta.enc_image"));
  cfg.encoder.base_channels = static_cast<int>(meta("__meta.enc_base"));
  cfg.encoder.blocks = static_cast<int>(meta("__meta.enc_blocks"));
  const auto variant = static_cast<PolicyVariant>(static_cast<int>(meta("__meta.policy_variant")));
  Rng scratch(0);
  BcPolicy p = BcPolicy::create(variant, cfg, scratch);
  nn::tensors_to_store(tensors, p.store_);
  return p;
}

void write_policy_manifest(const std::filesystem::path& ckpt_path, PolicyVariant variant,
                           const std::filesystem::path& feature_ckpt) {
  nlohmann::json j{{"variant", policy_name(variant)}};
  if (!feature_ckpt.empty()) {
    j["feature_checkpoint"] = feature_ckpt.string();
    j["feature_hash"] = nn::file_content_hash(feature_ckpt);
  }
  const std::filesystem::path manifest = ckpt_path.string() + ".json";
  std::ofstream os(manifest, std::ios::trunc);
  if (!os) throw DataError("cannot open for writing: " + manifest.string());
  os << j.dump(2) << "\n";
}

}  // namespace gatenav::policy
