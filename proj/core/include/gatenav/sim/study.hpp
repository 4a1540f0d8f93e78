#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "gatenav/sim/rollout.hpp"

namespace gatenav::sim {

struct CurvePoint {
  double amplitude = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  int trials = 0;
};

using AgentFactory = std::function<std::unique_ptr<Agent>()>;

// Success-rate study: for each amplitude, `trials` rollouts on freshly
// seeded randomized tracks; per-trial rng substreams keep the study
// deterministic in (seed, amplitude list) and independent of thread count.
std::vector<CurvePoint> evaluate_success(const AgentFactory& make_agent, const std::vector<double>& amplitudes,
                                         int trials, uint64_t seed, const RolloutLimits& limits,
                                         const ViewParams& view, int threads = 1);

// CSV: amplitude,mean,std,trials
void write_success_csv(const std::filesystem::path& path, const std::vector<CurvePoint>& curve);

// Multi-series success plot (one polyline per named curve).
void write_success_svg(const std::filesystem::path& path,
                       const std::vector<std::pair<std::string, std::vector<CurvePoint>>>& curves);

}  // namespace gatenav::sim
