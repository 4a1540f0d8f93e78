#pragma once

#include <filesystem>
#include <vector>

#include "gatenav/cmvae/model.hpp"

namespace gatenav::cmvae {

// One decoded point along an interpolation or traversal path.
struct AnalysisStep {
  std::vector<float> z;
  Tensor image;
  bool has_pose = false;
  scene::RelativeGatePose pose;
};

// Latent-space interpolation z_t = (1-t) mu_A + t mu_B for t evenly spaced
// in [0,1]; both decoders applied at each step (images only for the vanilla
// VAE). steps must be >= 2.
std::vector<AnalysisStep> interpolate(const CmvaeModel& model, const Tensor& image_a, const Tensor& image_b,
                                      int steps);

// Sweeps z[dim] over mu[dim] +/- span with the other dims held at mu.
std::vector<AnalysisStep> latent_traversal(const CmvaeModel& model, const Tensor& base_image, int dim, float span,
                                           int steps);

// Writes <prefix>.ppm (image mosaic) and <prefix>_poses.csv (step, z value
// of the varied dim when applicable, decoded pose columns).
void write_analysis_artifacts(const std::filesystem::path& dir, const std::string& prefix,
                              const std::vector<AnalysisStep>& steps);

}  // namespace gatenav::cmvae
