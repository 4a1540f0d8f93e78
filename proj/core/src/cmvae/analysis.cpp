#include "gatenav/cmvae/analysis.hpp"

#include <cstdio>
#include <fstream>

#include "gatenav/common/error.hpp"
#include "gatenav/io/ppm.hpp"

namespace gatenav::cmvae {

namespace {

AnalysisStep decode_step(const CmvaeModel& model, std::vector<float> z) {
  AnalysisStep s;
  s.image = model.decode_image(z);
  if (model.has_pose_decoder()) {
    s.pose = model.decode_pose(z);
    s.has_pose = true;
  }
  s.z = std::move(z);
  return s;
}

}  // namespace

std::vector<AnalysisStep> interpolate(const CmvaeModel& model, const Tensor& image_a, const Tensor& image_b,
                                      int steps) {
  if (steps < 2) throw ConfigError("interpolate: steps must be >= 2");
  if (!model.has_latent()) throw ConfigError("interpolate: regressor has no latent space");
  const std::vector<float> mu_a = model.encode(image_a).mu;
  const std::vector<float> mu_b = model.encode(image_b).mu;
  std::vector<AnalysisStep> out;
  out.reserve(static_cast<size_t>(steps));
  for (int k = 0; k < steps; ++k) {
    const float t = static_cast<float>(k) / static_cast<float>(steps - 1);
    std::vector<float> z(mu_a.size());
    for (size_t i = 0; i < z.size(); ++i) z[i] = (1.0f - t) * mu_a[i] + t * mu_b[i];
    out.push_back(decode_step(model, std::move(z)));
  }
  return out;
}

std::vector<AnalysisStep> latent_traversal(const CmvaeModel& model, const Tensor& base_image, int dim, float span,
                                           int steps) {
  if (!model.has_latent()) throw ConfigError("latent_traversal: regressor has no latent space");
  if (dim < 0 || dim >= model.config().latent)
    throw ConfigError("latent_traversal: dim " + std::to_string(dim) + " out of range");
  if (steps < 2) throw ConfigError("latent_traversal: steps must be >= 2");
  const std::vector<float> mu = model.encode(base_image).mu;
  std::vector<AnalysisStep> out;
  out.reserve(static_cast<size_t>(steps));
  for (int k = 0; k < steps; ++k) {
    std::vector<float> z = mu;
    z[static_cast<size_t>(dim)] =
        mu[static_cast<size_t>(dim)] - span + 2.0f * span * static_cast<float>(k) / static_cast<float>(steps - 1);
    out.push_back(decode_step(model, std::move(z)));
  }
  return out;
}

void write_analysis_artifacts(const std::filesystem::path& dir, const std::string& prefix,
                              const std::vector<AnalysisStep>& steps) {
  if (steps.empty()) throw DataError("write_analysis_artifacts: no steps");
  std::filesystem::create_directories(dir);
  std::vector<Tensor> images;
  images.reserve(steps.size());
  for (const auto& s : steps) images.push_back(s.image);
  write_ppm(dir / (prefix + ".ppm"), tile_images(images, static_cast<int>(images.size())));

  std::ofstream os(dir / (prefix + "_poses.csv"), std::ios::trunc);
  if (!os) throw DataError("cannot open for writing: " + (dir / (prefix + "_poses.csv")).string());
  os << "step,r,theta,phi,psi\n";
  char line[192];
  for (size_t k = 0; k < steps.size(); ++k) {
    if (steps[k].has_pose) {
      std::snprintf(line, sizeof(line), "%zu,%.9g,%.9g,%.9g,%.9g\n", k, steps[k].pose.r, steps[k].pose.theta,
                    steps[k].pose.phi, steps[k].pose.psi);
    } else {
      std::snprintf(line, sizeof(line), "%zu,,,,\n", k);
    }
    os << line;
  }
}

}  // namespace gatenav::cmvae
