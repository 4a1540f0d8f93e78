#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gatenav/cmvae/model.hpp"
#include "gatenav/scene/dataset.hpp"

namespace gatenav::cmvae {

enum class TrainMode { kSupervised, kUnsupervised };

struct TrainConfig {
  int epochs = 20;
  int batch_size = 64;
  float lr = 1e-3f;
  float kl_beta = -1.0f;  // < 0 means the default 4/N
  float w_img = 1.0f;     // per-pixel mean MSE weight
  float w_pose = 1.0f;    // per-component mean MSE weight
  float sup_frac = 0.5f;  // fraction of supervised batches
  double val_frac = 0.2;
  uint64_t seed = 1;
  float warmup_frac = 0.1f;   // linear KL warm-up over the first steps
  bool sample_latent = true;  // false replaces sampling with mu (tests)

  float resolved_beta(int latent) const { return kl_beta < 0.0f ? 4.0f / static_cast<float>(latent) : kl_beta; }
};

struct StepReport {
  double image_mse = 0.0;
  double pose_mse = 0.0;
  double kl = 0.0;
};

struct EpochLoss {
  int epoch = 0;
  std::string split;  // "train" or "val"
  double image_mse = 0.0;
  double pose_mse = 0.0;
  double kl = 0.0;
};

struct TrainResult {
  std::vector<EpochLoss> curve;
};

// Deterministic shuffled split; the same (n, val_frac, seed) triple always
// yields the same partition, shared by train() and the eval tooling.
struct SplitIndices {
  std::vector<int64_t> train;
  std::vector<int64_t> val;
};
SplitIndices dataset_split(int64_t n, double val_frac, uint64_t seed);

// One optimization step. Unsupervised updates encoder + image decoder;
// supervised updates encoder + pose decoder. The regressor accepts only
// supervised batches (plain MSE, no KL, no sampling) and the vanilla VAE
// only unsupervised ones. beta_override >= 0 bypasses the config beta
// (used by the warm-up schedule).
StepReport train_step(CmvaeModel& model, const std::vector<scene::LabeledSample>& batch, TrainMode mode,
                      const TrainConfig& cfg, Rng& rng, float beta_override = -1.0f);

// Full loop: seeded 80/20 split, per-epoch reshuffle, alternating batch
// modes per sup_frac, per-epoch train/val loss rows. Throws TrainError with
// the epoch index if the loss diverges.
TrainResult train(CmvaeModel& model, const scene::Dataset& dataset, const TrainConfig& cfg);

// CSV: epoch,split,image_mse,pose_mse,kl
void write_loss_curve_csv(const std::filesystem::path& path, const std::vector<EpochLoss>& curve);

}  // namespace gatenav::cmvae
