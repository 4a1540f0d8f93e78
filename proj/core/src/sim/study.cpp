#include "gatenav/sim/study.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "gatenav/common/error.hpp"
#include "gatenav/io/parallel.hpp"
#include "gatenav/io/svg.hpp"

namespace gatenav::sim {

std::vector<CurvePoint> evaluate_success(const AgentFactory& make_agent, const std::vector<double>& amplitudes,
                                         int trials, uint64_t seed, const RolloutLimits& limits,
                                         const ViewParams& view, int threads) {
  if (trials < 1) throw ConfigError("evaluate_success: trials must be >= 1");
  if (amplitudes.empty()) throw ConfigError("evaluate_success: no amplitudes");

  std::vector<CurvePoint> curve(amplitudes.size());
  for (size_t ai = 0; ai < amplitudes.size(); ++ai) {
    std::vector<double> scores(static_cast<size_t>(trials));
    parallel_for(trials, threads, [&](int64_t trial) {
      Rng trial_rng = Rng(seed, 0x73756363).fork(ai * 1000003ull + static_cast<uint64_t>(trial));
      TrackConfig track = make_track(trial_rng, amplitudes[ai]);
      auto agent = make_agent();
      const EpisodeRecord ep = rollout(*agent, track, limits, view, trial_rng);
      scores[static_cast<size_t>(trial)] = ep.score;
    });
    double mean = 0.0;
    for (double s : scores) mean += s;
    mean /= static_cast<double>(trials);
    double var = 0.0;
    for (double s : scores) var += (s - mean) * (s - mean);
    var = trials > 1 ? var / static_cast<double>(trials - 1) : 0.0;
    curve[ai] = {amplitudes[ai], mean, std::sqrt(var), trials};
  }
  return curve;
}

void write_success_csv(const std::filesystem::path& path, const std::vector<CurvePoint>& curve) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw DataError("cannot open for writing: " + path.string());
  os << "amplitude,mean,std,trials\n";
  char line[128];
  for (const auto& p : curve) {
    std::snprintf(line, sizeof(line), "%.3f,%.6f,%.6f,%d\n", p.amplitude, p.mean, p.stddev, p.trials);
    os << line;
  }
}

void write_success_svg(const std::filesystem::path& path,
                       const std::vector<std::pair<std::string, std::vector<CurvePoint>>>& curves) {
  std::vector<PlotSeries> series;
  for (const auto& [name, curve] : curves) {
    PlotSeries s;
    s.name = name;
    for (const auto& p : curve) s.points.emplace_back(p.amplitude, p.mean);
    series.push_back(std::move(s));
  }
  PlotSpec spec;
  spec.title = "Closed-loop success vs gate offset amplitude";
  spec.x_label = "offset amplitude [m]";
  spec.y_label = "success score";
  spec.fixed_y = true;
  spec.y_min = 0.0;
  spec.y_max = 1.0;
  write_plot_svg(path, spec, series);
}

}  // namespace gatenav::sim
