#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "gatenav/numerics/rng.hpp"
#include "gatenav/numerics/tensor.hpp"
#include "gatenav/scene/camera.hpp"
#include "gatenav/scene/pose.hpp"
#include "gatenav/scene/render.hpp"
#include "gatenav/scene/scene.hpp"

namespace gatenav::scene {

// Uniform sampling box for labeled views. Theta defaults are derived from
// the camera FOV so sampled gates stay inside the frame.
struct PoseRanges {
  double r_min = 2.0, r_max = 10.0;
  double theta_min = 0.0, theta_max = 0.0;
  double phi_min = M_PI / 2.0 - 0.4, phi_max = M_PI / 2.0 + 0.4;
  double psi_min = -M_PI / 2.0, psi_max = M_PI / 2.0;
  double roll_min = -0.15, roll_max = 0.15;
  double pitch_min = -0.15, pitch_max = 0.15;

  void validate() const;
};

PoseRanges default_pose_ranges(const CameraIntrinsics& cam, const SceneParams& scene);

// One labeled draw: relative pose plus the camera perturbation it was
// rendered with.
struct SampledView {
  RelativeGatePose pose;
  double roll = 0.0;
  double pitch = 0.0;
};

SampledView sample_pose(Rng& rng, const PoseRanges& ranges);

struct LabeledSample {
  Tensor image;  // [3 x H x W], values in [0,1]
  RelativeGatePose pose;
};

struct DatasetManifest {
  int format_version = 1;
  int64_t n = 0;
  int height = 0;
  int width = 0;
  uint64_t seed = 0;
  PoseRanges ranges;
  double hfov = 0.0;
};

// On-disk layout: images.bin (u8 RGB, H*W*3 bytes per sample, row-major
// interleaved), poses.csv (r,theta,phi,psi,roll,pitch), manifest.json.
// Deterministic in (seed, n, ranges); per-sample rng substreams allow the
// render fan-out across threads without changing a byte of output.
DatasetManifest generate_dataset(int64_t n, Rng& rng, const CameraIntrinsics& cam, const SceneParams& scene,
                                 const PoseRanges& ranges, const std::filesystem::path& out_dir, int threads = 1);

// In-memory dataset; images stay u8 and are widened per access.
class Dataset {
 public:
  const DatasetManifest& manifest() const { return manifest_; }
  int64_t size() const { return manifest_.n; }

  LabeledSample sample(int64_t i) const;
  const SampledView& view(int64_t i) const { return views_[static_cast<size_t>(i)]; }

  // Writes one sample's pixels into dst (3*H*W floats, CHW).
  void write_image(int64_t i, float* dst) const;

  static Dataset load(const std::filesystem::path& dir);
  static Dataset from_memory(DatasetManifest manifest, std::vector<uint8_t> pixels, std::vector<SampledView> views);

 private:
  DatasetManifest manifest_;
  std::vector<uint8_t> pixels_;  // n * H * W * 3, HWC
  std::vector<SampledView> views_;
};

Dataset load_dataset(const std::filesystem::path& dir);

// u8 quantization used by the on-disk format.
uint8_t quantize_u8(float v);

}  // namespace gatenav::scene
