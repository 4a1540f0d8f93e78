#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gatenav/cmvae/encoder.hpp"
#include "gatenav/cmvae/model.hpp"
#include "gatenav/common/command.hpp"
#include "gatenav/expert/demos.hpp"
#include "gatenav/sim/rollout.hpp"

namespace gatenav::policy {

// The five simulation policies: behavior cloning over frozen CM-VAE latents
// (con/unc), frozen vanilla-VAE latents (img), the frozen pose regressor
// (reg), and end-to-end training from pixels (full).
enum class PolicyVariant { kCon = 0, kUnc = 1, kImg = 2, kReg = 3, kFull = 4 };

std::string policy_name(PolicyVariant v);
PolicyVariant policy_from_name(const std::string& name);

// Which feature-model variant each frozen policy expects.
std::optional<cmvae::ModelVariant> required_feature_variant(PolicyVariant v);

// Feature vector for a frozen variant: encoder mu for latent variants, the
// regressed normalized pose (length 4) for kReg. kFull has no feature step.
std::vector<float> featurize(PolicyVariant variant, const cmvae::CmvaeModel& feature_model, const Tensor& image);

struct BcConfig {
  int feature_dim = 10;   // head input width; shared by all variants
  int hidden1 = 64;
  int hidden2 = 32;
  CommandLimits limits;
  // Encoder knobs, used by kFull only.
  cmvae::EncoderConfig encoder;
};

struct BcTrainConfig {
  int epochs = 60;
  int batch_size = 64;
  float lr = 1e-3f;
  double val_frac = 0.2;
  uint64_t seed = 1;
};

struct BcEpochLoss {
  int epoch = 0;
  std::string split;
  double action_mse = 0.0;
};

// Three dense layers with a tanh output in (-1,1)^4; identical topology for
// every variant (the kReg feature 4-vector is zero-padded to feature_dim so
// the parameter counts match).
class BcPolicy {
 public:
  static BcPolicy create(PolicyVariant variant, const BcConfig& cfg, Rng& rng);

  PolicyVariant variant() const { return variant_; }
  const BcConfig& config() const { return cfg_; }
  nn::ParameterStore& store() { return store_; }
  const nn::ParameterStore& store() const { return store_; }
  int64_t head_parameter_count() const;

  // Head over a feature batch [B x feature_dim] -> [B x 4] in (-1,1).
  nn::Var head_forward(const nn::Var& features) const;
  // kFull: pixels -> features -> head.
  nn::Var full_forward(const nn::Var& images) const;

  // Inference. feature_model may be null for kFull; required otherwise.
  VelocityCommand act(const cmvae::CmvaeModel* feature_model, const Tensor& image) const;

  void save(const std::filesystem::path& path) const;
  static BcPolicy load(const std::filesystem::path& path);

 private:
  BcPolicy() = default;

  PolicyVariant variant_ = PolicyVariant::kCon;
  BcConfig cfg_;
  nn::ParameterStore store_;
};

// Behavior cloning on normalized expert commands (MSE). Frozen variants
// train the head on cached features; kFull backpropagates into its encoder.
// The feature model itself is never touched.
std::vector<BcEpochLoss> bc_train(BcPolicy& policy, const cmvae::CmvaeModel* feature_model,
                                  const expert::DemoDataset& demos, const BcTrainConfig& cfg);

void write_bc_curve_csv(const std::filesystem::path& path, const std::vector<BcEpochLoss>& curve);

// Sidecar manifest pinning the feature checkpoint (path + content hash).
void write_policy_manifest(const std::filesystem::path& ckpt_path, PolicyVariant variant,
                           const std::filesystem::path& feature_ckpt);

// Rollout adapter.
class BcAgent : public sim::Agent {
 public:
  BcAgent(const BcPolicy& policy, const cmvae::CmvaeModel* feature_model)
      : policy_(policy), feature_model_(feature_model) {}
  bool wants_image() const override { return true; }
  VelocityCommand act(const sim::AgentContext& ctx) override;

 private:
  const BcPolicy& policy_;
  const cmvae::CmvaeModel* feature_model_;
};

}  // namespace gatenav::policy
