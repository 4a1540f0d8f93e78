#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "gatenav/cmvae/model.hpp"
#include "gatenav/scene/dataset.hpp"

namespace gatenav::cmvae {

// Held-out pose reconstruction errors, component order (r, theta, phi, psi).
// Radius in meters, angles in degrees; sem is sample std / sqrt(n).
struct PoseErrorReport {
  std::array<double, 4> mae{};
  std::array<double, 4> sem{};
  int64_t n = 0;
};

using PosePredictor = std::function<scene::RelativeGatePose(const scene::LabeledSample&)>;

// Generic path used by oracle tests.
PoseErrorReport evaluate_pose_error(const PosePredictor& predictor, const scene::Dataset& dataset,
                                    const std::vector<int64_t>& indices = {});

// Model path: encoder evaluated at mu (no sampling), batched. Works for both
// CM-VAE variants and the regressor.
PoseErrorReport evaluate_pose_error(const CmvaeModel& model, const scene::Dataset& dataset,
                                    const std::vector<int64_t>& indices = {});

// CSV with Table-style columns: model, radius_mae_m, radius_sem_m,
// azimuth_mae_deg, azimuth_sem_deg, polar_mae_deg, polar_sem_deg,
// yaw_mae_deg, yaw_sem_deg, n.
void write_pose_error_csv(const std::filesystem::path& path,
                          const std::vector<std::pair<std::string, PoseErrorReport>>& rows);

// Deterministic held-out index split matching the train() convention.
std::vector<int64_t> validation_indices(int64_t n, double val_frac, uint64_t seed);

}  // namespace gatenav::cmvae
