#include "gatenav/cmvae/model.hpp"

#include <cmath>

#include "gatenav/cmvae/encoder.hpp"
#include "gatenav/common/error.hpp"

namespace gatenav::cmvae {

using nn::Var;

std::string variant_name(ModelVariant v) {
  switch (v) {
    case ModelVariant::kCmvaeUnconstrained:
      return "cmvae_unc";
    case ModelVariant::kCmvaeConstrained:
      return "cmvae_con";
    case ModelVariant::kVanillaVae:
      return "vae";
    case ModelVariant::kRegressor:
      return "regressor";
  }
  throw ConfigError("unknown model variant");
}

ModelVariant variant_from_name(const std::string& name) {
  if (name == "cmvae_unc") return ModelVariant::kCmvaeUnconstrained;
  if (name == "cmvae_con") return ModelVariant::kCmvaeConstrained;
  if (name == "vae") return ModelVariant::kVanillaVae;
  if (name == "regressor") return ModelVariant::kRegressor;
  throw ConfigError("unknown model variant: " + name);
}

PoseNormalizer PoseNormalizer::from_ranges(const scene::PoseRanges& r) {
  PoseNormalizer n;
  n.center = {(r.r_min + r.r_max) / 2.0, (r.theta_min + r.theta_max) / 2.0, (r.phi_min + r.phi_max) / 2.0,
              (r.psi_min + r.psi_max) / 2.0};
  n.half = {(r.r_max - r.r_min) / 2.0, (r.theta_max - r.theta_min) / 2.0, (r.phi_max - r.phi_min) / 2.0,
            (r.psi_max - r.psi_min) / 2.0};
  for (double& h : n.half)
    if (h <= 0.0) h = 1.0;  // degenerate range: keep the map invertible
  return n;
}

std::array<float, 4> PoseNormalizer::normalize(const scene::RelativeGatePose& p) const {
  return {static_cast<float>((p.r - center[0]) / half[0]), static_cast<float>((p.theta - center[1]) / half[1]),
          static_cast<float>((p.phi - center[2]) / half[2]), static_cast<float>((p.psi - center[3]) / half[3])};
}

scene::RelativeGatePose PoseNormalizer::denormalize(const std::array<float, 4>& n) const {
  scene::RelativeGatePose p;
  p.r = std::max(center[0] + half[0] * n[0], 1e-6);
  p.theta = wrap_angle(center[1] + half[1] * n[1]);
  constexpr double kPoleEps = 1e-9;
  p.phi = std::clamp(center[2] + half[2] * n[2], kPoleEps, M_PI - kPoleEps);
  p.psi = wrap_angle(center[3] + half[3] * n[3]);
  return p;
}

void ModelConfig::validate() const {
  if (latent < 1) throw ConfigError("model: latent size must be >= 1");
  if (variant == ModelVariant::kCmvaeConstrained && latent < 4)
    throw ConfigError("model: constrained layout needs latent size >= 4");
  if (image_size < 8 || (image_size & (image_size - 1)) != 0)
    throw ConfigError("model: image_size must be a power of two >= 8");
  if (blocks < 1 || base_channels < 1) throw ConfigError("model: blocks and base_channels must be positive");
  if (image_size >> blocks < 4) throw ConfigError("model: too many stride-2 blocks for image size");
}

namespace {

struct ConvSpec {
  std::string name;
  int in_ch, out_ch, ksize, stride, pad;
};

EncoderConfig trunk_config(const ModelConfig& cfg) { return {cfg.image_size, cfg.base_channels, cfg.blocks}; }
int encoder_channels(const ModelConfig& cfg) { return trunk_config(cfg).out_channels(); }
int encoder_flat(const ModelConfig& cfg) { return trunk_config(cfg).flat_width(); }

int encoder_head_width(const ModelConfig& cfg) {
  return cfg.variant == ModelVariant::kRegressor ? 4 : 2 * cfg.latent;
}

// Image decoder: dense N -> C*4*4, then stride-2 transpose convs up to the
// target resolution, one extra stride-1 layer at >= 64x64, and a final
// stride-1 layer down to RGB (4 layers at 32x32, 6 at 64x64).
struct DecoderPlan {
  int start_ch = 0;
  std::vector<ConvSpec> layers;
};

DecoderPlan image_decoder_plan(const ModelConfig& cfg) {
  DecoderPlan plan;
  plan.start_ch = encoder_channels(cfg);
  int ch = plan.start_ch;
  int side = 4;
  int idx = 1;
  while (side < cfg.image_size) {
    const int out_ch = std::max(8, ch / 2);
    plan.layers.push_back({"dec_img.t" + std::to_string(idx++), ch, out_ch, 4, 2, 1});
    ch = out_ch;
    side *= 2;
  }
  if (cfg.image_size >= 64) plan.layers.push_back({"dec_img.t" + std::to_string(idx++), ch, ch, 3, 1, 1});
  plan.layers.push_back({"dec_img.t" + std::to_string(idx++), ch, 3, 3, 1, 1});
  return plan;
}

}  // namespace

CmvaeModel CmvaeModel::create(const ModelConfig& cfg, Rng& rng) {
  cfg.validate();
  CmvaeModel m;
  m.cfg_ = cfg;
  // Normalization constants live in f32 checkpoints; quantize up front so a
  // save/load round-trip reproduces every decoded pose bit-identically.
  for (int i = 0; i < 4; ++i) {
    m.cfg_.norm.center[static_cast<size_t>(i)] = static_cast<float>(m.cfg_.norm.center[static_cast<size_t>(i)]);
    m.cfg_.norm.half[static_cast<size_t>(i)] = static_cast<float>(m.cfg_.norm.half[static_cast<size_t>(i)]);
  }
  m.build_parameters(rng);
  return m;
}

void CmvaeModel::build_parameters(Rng& rng) {
  auto dense_param = [&](const std::string& name, int in, int out) {
    store_.create(name + ".w", nn::kaiming_uniform({in, out}, in, rng));
    store_.create(name + ".b", Tensor::zeros({out}));
  };

  build_encoder_params(store_, "enc.", trunk_config(cfg_), rng);
  dense_param("enc.head", encoder_flat(cfg_), encoder_head_width(cfg_));

  if (has_image_decoder()) {
    const DecoderPlan plan = image_decoder_plan(cfg_);
    dense_param("dec_img.fc", cfg_.latent, plan.start_ch * 4 * 4);
    for (const auto& l : plan.layers) {
      // Transpose conv kernels are [C_in x C_out x k x k].
      store_.create(l.name + ".w",
                    nn::kaiming_uniform({l.in_ch, l.out_ch, l.ksize, l.ksize}, l.in_ch * l.ksize * l.ksize, rng));
    }
  }

  if (has_pose_decoder()) {
    if (cfg_.variant == ModelVariant::kCmvaeUnconstrained) {
      dense_param("dec_pose.fc1", cfg_.latent, 64);
      dense_param("dec_pose.fc2", 64, 4);
    } else {
      for (const char* head : {"r", "theta", "psi", "phi"}) {
        dense_param(std::string("dec_pose.") + head + ".fc1", 1, 16);
        dense_param(std::string("dec_pose.") + head + ".fc2", 16, 1);
      }
    }
  }
}

Var CmvaeModel::encoder_trunk(const Var& images) const {
  return encoder_forward(store_, "enc.", trunk_config(cfg_), images);
}

CmvaeModel::Latent CmvaeModel::encode_batch(const Var& images) const {
  if (!has_latent()) throw ConfigError("encode: regressor variant has no latent distribution");
  Var head = nn::dense(encoder_trunk(images), store_.get("enc.head.w"), store_.get("enc.head.b"));
  return {nn::slice_cols(head, 0, cfg_.latent), nn::slice_cols(head, cfg_.latent, cfg_.latent)};
}

Var CmvaeModel::regress_batch(const Var& images) const {
  if (cfg_.variant != ModelVariant::kRegressor) throw ConfigError("regress: model is not a regressor");
  return nn::dense(encoder_trunk(images), store_.get("enc.head.w"), store_.get("enc.head.b"));
}

Var CmvaeModel::decode_image_batch(const Var& z) const {
  if (!has_image_decoder()) throw ConfigError("decode_image: variant has no image decoder");
  if (z.shape().size() != 2 || z.shape()[1] != cfg_.latent)
    throw ConfigError("decode_image: latent batch must be [B x " + std::to_string(cfg_.latent) + "], got " +
                      shape_str(z.shape()));
  const int batch = z.shape()[0];
  const DecoderPlan plan = image_decoder_plan(cfg_);
  Var x = nn::leaky_relu(nn::dense(z, store_.get("dec_img.fc.w"), store_.get("dec_img.fc.b")));
  x = nn::reshape(x, {batch, plan.start_ch, 4, 4});
  for (size_t i = 0; i < plan.layers.size(); ++i) {
    const auto& l = plan.layers[i];
    x = nn::transpose_conv2d(x, store_.get(l.name + ".w"), l.stride, l.pad);
    x = (i + 1 < plan.layers.size()) ? nn::leaky_relu(x) : nn::sigmoid(x);
  }
  return x;
}

Var CmvaeModel::decode_pose_batch(const Var& z) const {
  if (!has_pose_decoder()) throw ConfigError("decode_pose: unsupported variant " + variant_name(cfg_.variant));
  if (z.shape().size() != 2 || z.shape()[1] != cfg_.latent)
    throw ConfigError("decode_pose: latent batch must be [B x " + std::to_string(cfg_.latent) + "], got " +
                      shape_str(z.shape()));
  if (cfg_.variant == ModelVariant::kCmvaeUnconstrained) {
    Var h = nn::leaky_relu(nn::dense(z, store_.get("dec_pose.fc1.w"), store_.get("dec_pose.fc1.b")));
    return nn::dense(h, store_.get("dec_pose.fc2.w"), store_.get("dec_pose.fc2.b"));
  }
  // Constrained: scalar heads on dedicated dims (r<-z0, theta<-z1, psi<-z2,
  // phi<-z3), emitted in (r, theta, phi, psi) component order.
  auto head = [&](const char* name, int dim) {
    Var zi = nn::slice_cols(z, dim, 1);
    Var h = nn::leaky_relu(nn::dense(zi, store_.get(std::string("dec_pose.") + name + ".fc1.w"),
                                     store_.get(std::string("dec_pose.") + name + ".fc1.b")));
    return nn::dense(h, store_.get(std::string("dec_pose.") + name + ".fc2.w"),
                     store_.get(std::string("dec_pose.") + name + ".fc2.b"));
  };
  return nn::concat_cols({head("r", 0), head("theta", 1), head("phi", 3), head("psi", 2)});
}

nn::LatentDistribution CmvaeModel::encode(const Tensor& image) const {
  nn::NoGradGuard ng;
  Var batch = Var::constant(Tensor({1, 3, cfg_.image_size, cfg_.image_size}, image.vec()), "image");
  Latent lat = encode_batch(batch);
  nn::LatentDistribution d;
  d.mu = lat.mu.value().vec();
  d.sigma = nn::sigma_from_logvar(lat.logvar.value().vec());
  return d;
}

Tensor CmvaeModel::decode_image(const std::vector<float>& z) const {
  if (static_cast<int>(z.size()) != cfg_.latent)
    throw ConfigError("decode_image: latent length " + std::to_string(z.size()) + " != " +
                      std::to_string(cfg_.latent));
  nn::NoGradGuard ng;
  Var zb = Var::constant(Tensor({1, cfg_.latent}, z), "z");
  Tensor out = decode_image_batch(zb).value();
  return Tensor({3, cfg_.image_size, cfg_.image_size}, out.vec());
}

scene::RelativeGatePose CmvaeModel::decode_pose(const std::vector<float>& z) const {
  if (static_cast<int>(z.size()) != cfg_.latent)
    throw ConfigError("decode_pose: latent length " + std::to_string(z.size()) + " != " +
                      std::to_string(cfg_.latent));
  nn::NoGradGuard ng;
  Var zb = Var::constant(Tensor({1, cfg_.latent}, z), "z");
  const Tensor out = decode_pose_batch(zb).value();
  return cfg_.norm.denormalize({out.at(0), out.at(1), out.at(2), out.at(3)});
}

std::array<float, 4> CmvaeModel::regress(const Tensor& image) const {
  nn::NoGradGuard ng;
  Var batch = Var::constant(Tensor({1, 3, cfg_.image_size, cfg_.image_size}, image.vec()), "image");
  const Tensor out = regress_batch(batch).value();
  return {out.at(0), out.at(1), out.at(2), out.at(3)};
}

void CmvaeModel::save(const std::filesystem::path& path) const {
  std::vector<nn::NamedTensor> tensors = nn::store_to_tensors(store_);
  tensors.push_back({"__meta.variant", Tensor::scalar(static_cast<float>(static_cast<int>(cfg_.variant)))});
  tensors.push_back({"__meta.latent", Tensor::scalar(static_cast<float>(cfg_.latent))});
  tensors.push_back({"__meta.image_size", Tensor::scalar(static_cast<float>(cfg_.image_size))});
  tensors.push_back({"__meta.base_channels", Tensor::scalar(static_cast<float>(cfg_.base_channels))});
  tensors.push_back({"__meta.blocks", Tensor::scalar(static_cast<float>(cfg_.blocks))});
  Tensor center({4}), half({4});
  for (int i = 0; i < 4; ++i) {
    center.at(i) = static_cast<float>(cfg_.norm.center[static_cast<size_t>(i)]);
    half.at(i) = static_cast<float>(cfg_.norm.half[static_cast<size_t>(i)]);
  }
  tensors.push_back({"__meta.pose_center", std::move(center)});
  tensors.push_back({"__meta.pose_half", std::move(half)});
  nn::save_checkpoint(path, tensors);
}

CmvaeModel CmvaeModel::load(const std::filesystem::path& path) {
  const std::vector<nn::NamedTensor> tensors = nn::load_checkpoint(path);
  auto meta = [&tensors, &path](const std::string& name) -> const Tensor& {
    for (const auto& nt : tensors)
      if (nt.name == name) return nt.tensor;
    throw DataError("checkpoint " + path.string() + " is missing " + name);
  };
  ModelConfig cfg;
  cfg.variant = static_cast<ModelVariant>(static_cast<int>(meta("__meta.variant").at(0)));
  cfg.latent = static_cast<int>(meta("__meta.latent").at(0));
  cfg.image_size = static_cast<int>(meta("__meta.image_size").at(0));
  cfg.base_channels = static_cast<int>(meta("__meta.base_channels").at(0));
  cfg.blocks = static_cast<int>(meta("__meta.blocks").at(0));
  const Tensor& center = meta("__meta.pose_center");
  const Tensor& half = meta("__meta.pose_half");
  for (int i = 0; i < 4; ++i) {
    cfg.norm.center[static_cast<size_t>(i)] = center.at(i);
    cfg.norm.half[static_cast<size_t>(i)] = half.at(i);
  }
  Rng scratch(0);
  CmvaeModel m = CmvaeModel::create(cfg, scratch);
  nn::tensors_to_store(tensors, m.store_);
  return m;
}

}  // namespace gatenav::cmvae
