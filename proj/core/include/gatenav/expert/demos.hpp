#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "gatenav/expert/agent.hpp"
#include "gatenav/sim/rollout.hpp"

namespace gatenav::expert {

struct DemoConfig {
  int64_t target_records = 8000;
  std::vector<double> amplitudes = {0.0, 1.0, 2.0, 3.0};  // cycled across episodes
  int gates_per_episode = 8;                              // one lap
  int max_episodes = 0;                                   // 0 = run until target_records
  ExpertAgent::Config expert;
  sim::RolloutLimits limits;
  double track_circumference = 50.0;
  double track_altitude = 2.0;
  int gate_count = 8;
};

struct DemoManifest {
  int format_version = 1;
  int64_t records = 0;
  int episodes = 0;
  int discarded = 0;  // episodes the expert failed to complete
  std::vector<double> amplitudes;
  uint64_t seed = 0;
  double v_max = 0.0;
  double omega_max = 0.0;
  int height = 0;
  int width = 0;
  double dt = 0.0;
};

// Runs the expert closed-loop, rendering the onboard view each control tick,
// and writes images.bin + actions.csv
// (vx,vy,vz,vpsi,nvx,nvy,nvz,nvpsi) + manifest.json. Episodes that do not
// complete are discarded and counted. Deterministic in the rng seed.
DemoManifest generate_demonstrations(const DemoConfig& cfg, const sim::ViewParams& view, Rng& rng,
                                     const std::filesystem::path& out_dir);

struct DemoRecord {
  Tensor image;                  // [3 x H x W]
  VelocityCommand command;       // raw expert command
  std::array<float, 4> normalized{};  // clamped, scaled to [-1,1]
};

class DemoDataset {
 public:
  const DemoManifest& manifest() const { return manifest_; }
  int64_t size() const { return manifest_.records; }

  DemoRecord record(int64_t i) const;
  void write_image(int64_t i, float* dst) const;  // 3*H*W floats, CHW
  const std::array<float, 4>& action(int64_t i) const { return actions_norm_[static_cast<size_t>(i)]; }
  const VelocityCommand& raw_action(int64_t i) const { return actions_raw_[static_cast<size_t>(i)]; }

  static DemoDataset load(const std::filesystem::path& dir);
  static DemoDataset from_memory(DemoManifest manifest, std::vector<uint8_t> pixels,
                                 std::vector<VelocityCommand> raw, std::vector<std::array<float, 4>> norm);

 private:
  DemoManifest manifest_;
  std::vector<uint8_t> pixels_;  // HWC u8 frames
  std::vector<VelocityCommand> actions_raw_;
  std::vector<std::array<float, 4>> actions_norm_;
};

}  // namespace gatenav::expert
