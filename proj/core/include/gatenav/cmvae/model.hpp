#pragma once

#include <array>
#include <filesystem>
#include <string>

#include "gatenav/numerics/adam.hpp"
#include "gatenav/numerics/checkpoint.hpp"
#include "gatenav/numerics/gaussian.hpp"
#include "gatenav/numerics/ops.hpp"
#include "gatenav/scene/dataset.hpp"

namespace gatenav::cmvae {

enum class ModelVariant { kCmvaeUnconstrained = 0, kCmvaeConstrained = 1, kVanillaVae = 2, kRegressor = 3 };

std::string variant_name(ModelVariant v);
ModelVariant variant_from_name(const std::string& name);

// Maps pose components to/from the normalized [-1,1] space the losses run
// in: norm = (value - center) / half, component order (r, theta, phi, psi).
struct PoseNormalizer {
  std::array<double, 4> center{6.0, 0.0, M_PI / 2.0, 0.0};
  std::array<double, 4> half{4.0, 0.4363323129985824, 0.4, M_PI / 2.0};

  static PoseNormalizer from_ranges(const scene::PoseRanges& ranges);
  std::array<float, 4> normalize(const scene::RelativeGatePose& p) const;
  scene::RelativeGatePose denormalize(const std::array<float, 4>& n) const;
};

struct ModelConfig {
  ModelVariant variant = ModelVariant::kCmvaeConstrained;
  int latent = 10;
  int image_size = 32;
  int base_channels = 16;  // residual stack widths double per block
  int blocks = 3;
  PoseNormalizer norm;

  void validate() const;
};

// Encoder (residual conv stack), image decoder (transpose-conv stack) and
// pose decoder(s) over one latent space. The constrained layout wires four
// independent single-input heads to z[0..3]: r<-z0, theta<-z1, psi<-z2,
// phi<-z3; image reconstruction always reads the full latent vector.
class CmvaeModel {
 public:
  struct Latent {
    nn::Var mu;      // [B x N]
    nn::Var logvar;  // [B x N]
  };

  static CmvaeModel create(const ModelConfig& cfg, Rng& rng);

  const ModelConfig& config() const { return cfg_; }
  nn::ParameterStore& store() { return store_; }
  const nn::ParameterStore& store() const { return store_; }

  // Graph-level paths over batches.
  Latent encode_batch(const nn::Var& images) const;        // vae variants
  nn::Var regress_batch(const nn::Var& images) const;      // regressor: [B x 4] normalized pose
  nn::Var decode_image_batch(const nn::Var& z) const;      // [B x 3 x S x S], sigmoid-squashed
  nn::Var decode_pose_batch(const nn::Var& z) const;       // [B x 4] normalized pose

  // Spec-level single-sample operations.
  nn::LatentDistribution encode(const Tensor& image) const;
  Tensor decode_image(const std::vector<float>& z) const;
  scene::RelativeGatePose decode_pose(const std::vector<float>& z) const;
  // Normalized 4-vector feature for the regressor variant.
  std::array<float, 4> regress(const Tensor& image) const;

  bool has_latent() const { return cfg_.variant != ModelVariant::kRegressor; }
  bool has_pose_decoder() const {
    return cfg_.variant == ModelVariant::kCmvaeUnconstrained || cfg_.variant == ModelVariant::kCmvaeConstrained;
  }
  bool has_image_decoder() const { return has_latent(); }

  void save(const std::filesystem::path& path) const;
  static CmvaeModel load(const std::filesystem::path& path);

  // Parameter group prefixes for update routing.
  static constexpr const char* kEncoderPrefix = "enc.";
  static constexpr const char* kImageDecoderPrefix = "dec_img.";
  static constexpr const char* kPoseDecoderPrefix = "dec_pose.";

 private:
  CmvaeModel() = default;
  nn::Var encoder_trunk(const nn::Var& images) const;  // flattened conv features
  void build_parameters(Rng& rng);

  ModelConfig cfg_;
  nn::ParameterStore store_;
};

}  // namespace gatenav::cmvae
