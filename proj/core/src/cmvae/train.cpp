#include "gatenav/cmvae/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "gatenav/common/error.hpp"

namespace gatenav::cmvae {

using nn::Var;

namespace {

struct BatchTensors {
  Tensor images;  // [B x 3 x S x S]
  Tensor poses;   // [B x 4], normalized
};

BatchTensors gather_batch(const scene::Dataset& ds, const std::vector<int64_t>& indices, size_t begin, size_t count,
                          const PoseNormalizer& norm, int image_size) {
  BatchTensors b;
  const int n = static_cast<int>(count);
  b.images = Tensor({n, 3, image_size, image_size});
  b.poses = Tensor({n, 4});
  const int64_t stride = 3LL * image_size * image_size;
  for (int i = 0; i < n; ++i) {
    const int64_t idx = indices[begin + static_cast<size_t>(i)];
    ds.write_image(idx, b.images.data() + i * stride);
    const auto pn = norm.normalize(ds.view(idx).pose);
    for (int c = 0; c < 4; ++c) b.poses.at(i * 4 + c) = pn[static_cast<size_t>(c)];
  }
  return b;
}

StepReport step_on_tensors(CmvaeModel& model, Tensor images, Tensor poses, TrainMode mode, const TrainConfig& cfg,
                           Rng& rng, float beta) {
  const ModelVariant variant = model.config().variant;
  if (variant == ModelVariant::kRegressor && mode != TrainMode::kSupervised)
    throw ConfigError("train_step: regressor supports supervised mode only");
  if (variant == ModelVariant::kVanillaVae && mode != TrainMode::kUnsupervised)
    throw ConfigError("train_step: vanilla VAE supports unsupervised mode only");

  const nn::AdamConfig adam{cfg.lr, 0.9f, 0.999f, 1e-8f};
  StepReport rep;

  Var image_in = Var::constant(std::move(images), "batch_images");
  Var pose_in = Var::constant(std::move(poses), "batch_poses");

  if (variant == ModelVariant::kRegressor) {
    Var pred = model.regress_batch(image_in);
    Var pmse = nn::mse(pred, pose_in);
    Var loss = nn::scale(pmse, cfg.w_pose);
    nn::backward(loss);
    model.store().adam_step(adam, {CmvaeModel::kEncoderPrefix});
    rep.pose_mse = pmse.item();
    return rep;
  }

  CmvaeModel::Latent lat = model.encode_batch(image_in);
  Var z = cfg.sample_latent ? nn::reparameterize(lat.mu, lat.logvar, rng) : lat.mu;
  Var kl = nn::kl_divergence(lat.mu, lat.logvar);
  rep.kl = kl.item();

  if (mode == TrainMode::kUnsupervised) {
    Var recon = nn::mse(model.decode_image_batch(z), image_in);
    rep.image_mse = recon.item();
    Var loss = nn::scale(recon, cfg.w_img);
    if (beta > 0.0f) loss = nn::add(loss, nn::scale(kl, beta));
    nn::backward(loss);
    model.store().adam_step(adam, {CmvaeModel::kEncoderPrefix, CmvaeModel::kImageDecoderPrefix});
  } else {
    Var pmse = nn::mse(model.decode_pose_batch(z), pose_in);
    rep.pose_mse = pmse.item();
    Var loss = nn::scale(pmse, cfg.w_pose);
    if (beta > 0.0f) loss = nn::add(loss, nn::scale(kl, beta));
    nn::backward(loss);
    model.store().adam_step(adam, {CmvaeModel::kEncoderPrefix, CmvaeModel::kPoseDecoderPrefix});
  }
  return rep;
}

// Validation losses at z = mu (no sampling).
EpochLoss validate(const CmvaeModel& model, const scene::Dataset& ds, const std::vector<int64_t>& indices,
                   int batch_size) {
  nn::NoGradGuard ng;
  EpochLoss out;
  out.split = "val";
  if (indices.empty()) return out;
  const auto& cfg = model.config();
  double img_acc = 0.0, pose_acc = 0.0, kl_acc = 0.0;
  int64_t seen = 0;
  for (size_t at = 0; at < indices.size(); at += static_cast<size_t>(batch_size)) {
    const size_t count = std::min(static_cast<size_t>(batch_size), indices.size() - at);
    BatchTensors b = gather_batch(ds, indices, at, count, cfg.norm, cfg.image_size);
    Var image_in = Var::constant(std::move(b.images), "val_images");
    Var pose_in = Var::constant(std::move(b.poses), "val_poses");
    const double w = static_cast<double>(count);
    if (cfg.variant == ModelVariant::kRegressor) {
      pose_acc += w * nn::mse(model.regress_batch(image_in), pose_in).item();
    } else {
      CmvaeModel::Latent lat = model.encode_batch(image_in);
      kl_acc += w * nn::kl_divergence(lat.mu, lat.logvar).item();
      img_acc += w * nn::mse(model.decode_image_batch(lat.mu), image_in).item();
      if (model.has_pose_decoder()) pose_acc += w * nn::mse(model.decode_pose_batch(lat.mu), pose_in).item();
    }
    seen += static_cast<int64_t>(count);
  }
  out.image_mse = img_acc / static_cast<double>(seen);
  out.pose_mse = pose_acc / static_cast<double>(seen);
  out.kl = kl_acc / static_cast<double>(seen);
  return out;
}

}  // namespace

StepReport train_step(CmvaeModel& model, const std::vector<scene::LabeledSample>& batch, TrainMode mode,
                      const TrainConfig& cfg, Rng& rng, float beta_override) {
  if (batch.empty()) throw ConfigError("train_step: empty batch");
  const auto& mcfg = model.config();
  const int n = static_cast<int>(batch.size());
  Tensor images({n, 3, mcfg.image_size, mcfg.image_size});
  Tensor poses({n, 4});
  const int64_t stride = 3LL * mcfg.image_size * mcfg.image_size;
  for (int i = 0; i < n; ++i) {
    if (batch[static_cast<size_t>(i)].image.size() != stride)
      throw ConfigError("train_step: sample image shape does not match model");
    std::copy(batch[static_cast<size_t>(i)].image.vec().begin(), batch[static_cast<size_t>(i)].image.vec().end(),
              images.data() + i * stride);
    const auto pn = mcfg.norm.normalize(batch[static_cast<size_t>(i)].pose);
    for (int c = 0; c < 4; ++c) poses.at(i * 4 + c) = pn[static_cast<size_t>(c)];
  }
  const float beta = beta_override >= 0.0f ? beta_override : cfg.resolved_beta(mcfg.latent);
  return step_on_tensors(model, std::move(images), std::move(poses), mode, cfg, rng, beta);
}

SplitIndices dataset_split(int64_t n, double val_frac, uint64_t seed) {
  Rng rng(seed, 0x73706c69);  // dedicated split stream
  std::vector<int64_t> indices(static_cast<size_t>(n));
  std::iota(indices.begin(), indices.end(), 0);
  for (int64_t i = n - 1; i > 0; --i)
    std::swap(indices[static_cast<size_t>(i)], indices[rng.uniform_index(static_cast<uint64_t>(i + 1))]);
  const int64_t val_n = std::min<int64_t>(n, std::llround(static_cast<double>(n) * val_frac));
  SplitIndices split;
  split.val.assign(indices.end() - val_n, indices.end());
  split.train.assign(indices.begin(), indices.end() - val_n);
  return split;
}

TrainResult train(CmvaeModel& model, const scene::Dataset& dataset, const TrainConfig& cfg) {
  TrainResult result;
  if (cfg.epochs <= 0) return result;
  const int64_t n = dataset.size();
  if (n < cfg.batch_size) throw ConfigError("train: dataset smaller than one batch");

  Rng rng(cfg.seed, 0x7261696e);  // dedicated training stream

  SplitIndices split = dataset_split(n, cfg.val_frac, cfg.seed);
  std::vector<int64_t>& train_idx = split.train;
  const std::vector<int64_t>& val_idx = split.val;

  const auto& mcfg = model.config();
  const int64_t steps_per_epoch = static_cast<int64_t>(train_idx.size()) / cfg.batch_size;
  if (steps_per_epoch == 0) throw ConfigError("train: training split smaller than one batch");
  const int64_t total_steps = steps_per_epoch * cfg.epochs;
  const int64_t warmup_steps = static_cast<int64_t>(std::ceil(static_cast<double>(total_steps) * cfg.warmup_frac));
  const float beta_final = cfg.resolved_beta(mcfg.latent);

  int64_t global_step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    try {
      for (int64_t i = static_cast<int64_t>(train_idx.size()) - 1; i > 0; --i)
        std::swap(train_idx[static_cast<size_t>(i)], train_idx[rng.uniform_index(static_cast<uint64_t>(i + 1))]);

      double img_acc = 0.0, pose_acc = 0.0, kl_acc = 0.0;
      int64_t img_steps = 0, pose_steps = 0;
      for (int64_t s = 0; s < steps_per_epoch; ++s, ++global_step) {
        TrainMode mode;
        if (mcfg.variant == ModelVariant::kRegressor) {
          mode = TrainMode::kSupervised;
        } else if (mcfg.variant == ModelVariant::kVanillaVae) {
          mode = TrainMode::kUnsupervised;
        } else {
          // Bresenham-style alternation hitting sup_frac exactly in the limit.
          const double f = cfg.sup_frac;
          mode = (std::floor(static_cast<double>(s + 1) * f) > std::floor(static_cast<double>(s) * f))
                     ? TrainMode::kSupervised
                     : TrainMode::kUnsupervised;
        }
        const float beta_now =
            warmup_steps > 0
                ? beta_final * static_cast<float>(std::min<int64_t>(global_step + 1, warmup_steps)) /
                      static_cast<float>(warmup_steps)
                : beta_final;

        BatchTensors b = gather_batch(dataset, train_idx, static_cast<size_t>(s) * cfg.batch_size,
                                      static_cast<size_t>(cfg.batch_size), mcfg.norm, mcfg.image_size);
        const StepReport rep =
            step_on_tensors(model, std::move(b.images), std::move(b.poses), mode, cfg, rng, beta_now);
        kl_acc += rep.kl;
        if (mode == TrainMode::kUnsupervised) {
          img_acc += rep.image_mse;
          ++img_steps;
        } else {
          pose_acc += rep.pose_mse;
          ++pose_steps;
        }
      }

      EpochLoss tr;
      tr.epoch = epoch;
      tr.split = "train";
      tr.image_mse = img_steps ? img_acc / static_cast<double>(img_steps) : 0.0;
      tr.pose_mse = pose_steps ? pose_acc / static_cast<double>(pose_steps) : 0.0;
      tr.kl = kl_acc / static_cast<double>(steps_per_epoch);
      result.curve.push_back(tr);

      EpochLoss va = validate(model, dataset, val_idx, cfg.batch_size);
      va.epoch = epoch;
      result.curve.push_back(va);
    } catch (const NumericsError& e) {
      throw TrainError("training diverged at epoch " + std::to_string(epoch) + ": " + e.what());
    }
  }
  return result;
}

void write_loss_curve_csv(const std::filesystem::path& path, const std::vector<EpochLoss>& curve) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw DataError("cannot open for writing: " + path.string());
  os << "epoch,split,image_mse,pose_mse,kl\n";
  char line[192];
  for (const auto& row : curve) {
    std::snprintf(line, sizeof(line), "%d,%s,%.9g,%.9g,%.9g\n", row.epoch, row.split.c_str(), row.image_mse,
                  row.pose_mse, row.kl);
    os << line;
  }
  if (!os) throw DataError("write failed: " + path.string());
}

}  // namespace gatenav::cmvae
