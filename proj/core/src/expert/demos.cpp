#include "gatenav/expert/demos.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "gatenav/common/error.hpp"
#include "gatenav/scene/dataset.hpp"

namespace gatenav::expert {

using nlohmann::json;

void ExpertAgent::reset(const sim::TrackConfig& track, const sim::DroneState& state, const Vec3& vel_world) {
  replan(track, 0, state, vel_world);
}

void ExpertAgent::on_traversal(const sim::TrackConfig& track, int new_target, const sim::DroneState& state,
                               const Vec3& vel_world) {
  replan(track, new_target, state, vel_world);
}

VelocityCommand ExpertAgent::act(const sim::AgentContext& ctx) {
  return pure_pursuit(ctx.state, segment_, cfg_.pursuit);
}

void ExpertAgent::replan(const sim::TrackConfig& track, int target, const sim::DroneState& state,
                         const Vec3& vel_world) {
  const sim::GatePlacement& gate = track.gates.at(static_cast<size_t>(target));
  const Vec3 goal = gate.center();
  const Vec3 normal{std::cos(gate.facing_yaw), std::sin(gate.facing_yaw), 0.0};
  const double dist = (goal - state.position).norm();
  const double duration = std::max(dist / cfg_.pursuit.v_nominal, cfg_.min_duration);
  segment_ = plan_min_jerk({state.position, vel_world, Vec3{}}, goal, normal * cfg_.v_cross, duration);
  segment_.start_time = state.time;
}

DemoManifest generate_demonstrations(const DemoConfig& cfg, const sim::ViewParams& view, Rng& rng,
                                     const std::filesystem::path& out_dir) {
  if (cfg.target_records <= 0 && cfg.max_episodes <= 0)
    throw ConfigError("generate_demonstrations: need target_records or max_episodes");
  if (cfg.amplitudes.empty()) throw ConfigError("generate_demonstrations: amplitude cycle is empty");
  std::filesystem::create_directories(out_dir);

  const int h = view.cam.height, w = view.cam.width;
  const size_t stride = static_cast<size_t>(h) * w * 3;

  std::vector<uint8_t> pixels;
  std::vector<VelocityCommand> raw;
  std::vector<std::array<float, 4>> norm;

  sim::RolloutLimits limits = cfg.limits;
  limits.total_gates = cfg.gates_per_episode;

  DemoManifest m;
  m.amplitudes = cfg.amplitudes;
  m.seed = rng.seed();
  m.v_max = limits.limits.v_max;
  m.omega_max = limits.limits.omega_max;
  m.height = h;
  m.width = w;
  m.dt = limits.dt;

  int episode = 0;
  while (true) {
    if (cfg.max_episodes > 0 && episode >= cfg.max_episodes) break;
    if (cfg.target_records > 0 && static_cast<int64_t>(raw.size()) >= cfg.target_records) break;

    const double amplitude = cfg.amplitudes[static_cast<size_t>(episode) % cfg.amplitudes.size()];
    Rng ep_rng = rng.fork(static_cast<uint64_t>(episode));
    sim::TrackConfig track =
        sim::make_track(ep_rng, amplitude, cfg.track_circumference, cfg.track_altitude, cfg.gate_count);

    std::vector<uint8_t> ep_pixels;
    std::vector<VelocityCommand> ep_raw;
    std::vector<std::array<float, 4>> ep_norm;
    const sim::DemoSink sink = [&](const Tensor& image, const VelocityCommand& cmd,
                                   const std::array<double, 4>& n) {
      const size_t at = ep_pixels.size();
      ep_pixels.resize(at + stride);
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          for (int c = 0; c < 3; ++c)
            ep_pixels[at + (static_cast<size_t>(y) * w + x) * 3 + c] =
                scene::quantize_u8(image.at((static_cast<int64_t>(c) * h + y) * w + x));
      ep_raw.push_back(cmd);
      ep_norm.push_back({static_cast<float>(n[0]), static_cast<float>(n[1]), static_cast<float>(n[2]),
                         static_cast<float>(n[3])});
    };

    ExpertAgent agent(cfg.expert);
    const sim::EpisodeRecord ep = sim::rollout(agent, track, limits, view, ep_rng, &sink);
    ++episode;
    if (ep.termination != sim::Termination::kCompleted) {
      ++m.discarded;  // expert failure: drop the episode's records
      continue;
    }
    pixels.insert(pixels.end(), ep_pixels.begin(), ep_pixels.end());
    raw.insert(raw.end(), ep_raw.begin(), ep_raw.end());
    norm.insert(norm.end(), ep_norm.begin(), ep_norm.end());
  }

  if (cfg.target_records > 0 && static_cast<int64_t>(raw.size()) > cfg.target_records) {
    raw.resize(static_cast<size_t>(cfg.target_records));
    norm.resize(static_cast<size_t>(cfg.target_records));
    pixels.resize(static_cast<size_t>(cfg.target_records) * stride);
  }
  m.records = static_cast<int64_t>(raw.size());
  m.episodes = episode;

  try {
    {
      std::ofstream os(out_dir / "images.bin", std::ios::binary | std::ios::trunc);
      if (!os) throw DataError("cannot open for writing: " + (out_dir / "images.bin").string());
      os.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
      if (!os) throw DataError("write failed: " + (out_dir / "images.bin").string());
    }
    {
      std::ofstream os(out_dir / "actions.csv", std::ios::trunc);
      if (!os) throw DataError("cannot open for writing: " + (out_dir / "actions.csv").string());
      os << "vx,vy,vz,vpsi,nvx,nvy,nvz,nvpsi\n";
      char line[256];
      for (size_t i = 0; i < raw.size(); ++i) {
        std::snprintf(line, sizeof(line), "%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f\n", raw[i].vx, raw[i].vy,
                      raw[i].vz, raw[i].vpsi, static_cast<double>(norm[i][0]), static_cast<double>(norm[i][1]),
                      static_cast<double>(norm[i][2]), static_cast<double>(norm[i][3]));
        os << line;
      }
      if (!os) throw DataError("write failed: " + (out_dir / "actions.csv").string());
    }
    json j{{"format_version", m.format_version},
           {"n", m.records},
           {"episodes", m.episodes},
           {"discarded", m.discarded},
           {"amplitudes", m.amplitudes},
           {"seed", m.seed},
           {"v_max", m.v_max},
           {"omega_max", m.omega_max},
           {"height", m.height},
           {"width", m.width},
           {"dt", m.dt}};
    std::ofstream os(out_dir / "manifest.json", std::ios::trunc);
    if (!os) throw DataError("cannot open for writing: " + (out_dir / "manifest.json").string());
    os << j.dump(2) << "\n";
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(out_dir / "images.bin", ec);
    std::filesystem::remove(out_dir / "actions.csv", ec);
    std::filesystem::remove(out_dir / "manifest.json", ec);
    throw;
  }
  return m;
}

DemoRecord DemoDataset::record(int64_t i) const {
  DemoRecord r;
  r.image = Tensor({3, manifest_.height, manifest_.width});
  write_image(i, r.image.data());
  r.command = actions_raw_[static_cast<size_t>(i)];
  r.normalized = actions_norm_[static_cast<size_t>(i)];
  return r;
}

void DemoDataset::write_image(int64_t i, float* dst) const {
  const int h = manifest_.height, w = manifest_.width;
  const uint8_t* src = pixels_.data() + static_cast<size_t>(i) * h * w * 3;
  constexpr float kInv = 1.0f / 255.0f;
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        dst[(static_cast<int64_t>(c) * h + y) * w + x] = kInv * src[(static_cast<size_t>(y) * w + x) * 3 + c];
}

DemoDataset DemoDataset::load(const std::filesystem::path& dir) {
  std::ifstream ms(dir / "manifest.json");
  if (!ms) throw DataError("missing demo manifest: " + (dir / "manifest.json").string());
  json j;
  try {
    ms >> j;
  } catch (const json::exception& e) {
    throw DataError("malformed manifest " + (dir / "manifest.json").string() + ": " + e.what());
  }
  DemoManifest m;
  m.format_version = j.at("format_version");
  if (m.format_version != 1) throw DataError("unsupported demo format_version in " + dir.string());
  m.records = j.at("n");
  m.episodes = j.at("episodes");
  m.discarded = j.at("discarded");
  m.amplitudes = j.at("amplitudes").get<std::vector<double>>();
  m.seed = j.at("seed");
  m.v_max = j.at("v_max");
  m.omega_max = j.at("omega_max");
  m.height = j.at("height");
  m.width = j.at("width");
  m.dt = j.at("dt");

  std::ifstream is(dir / "images.bin", std::ios::binary);
  if (!is) throw DataError("missing images.bin: " + (dir / "images.bin").string());
  std::vector<uint8_t> pixels((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  const size_t stride = static_cast<size_t>(m.height) * m.width * 3;
  if (pixels.size() != static_cast<size_t>(m.records) * stride) {
    const size_t first_incomplete = stride == 0 ? 0 : pixels.size() / stride;
    throw DataError("corrupt demo images.bin in " + dir.string() + ": record " + std::to_string(first_incomplete) +
                    " incomplete");
  }

  std::ifstream as(dir / "actions.csv");
  if (!as) throw DataError("missing actions.csv: " + (dir / "actions.csv").string());
  std::string line;
  std::getline(as, line);  // header
  std::vector<VelocityCommand> raw;
  std::vector<std::array<float, 4>> norm;
  while (std::getline(as, line)) {
    if (line.empty()) continue;
    VelocityCommand c;
    double n0, n1, n2, n3;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf", &c.vx, &c.vy, &c.vz, &c.vpsi, &n0, &n1, &n2,
                    &n3) != 8)
      throw DataError("malformed row in actions.csv: " + line);
    raw.push_back(c);
    norm.push_back({static_cast<float>(n0), static_cast<float>(n1), static_cast<float>(n2), static_cast<float>(n3)});
  }
  if (static_cast<int64_t>(raw.size()) != m.records)
    throw DataError("actions.csv row count " + std::to_string(raw.size()) + " != manifest n " +
                    std::to_string(m.records));
  return from_memory(std::move(m), std::move(pixels), std::move(raw), std::move(norm));
}

DemoDataset DemoDataset::from_memory(DemoManifest manifest, std::vector<uint8_t> pixels,
                                     std::vector<VelocityCommand> raw, std::vector<std::array<float, 4>> norm) {
  DemoDataset d;
  d.manifest_ = std::move(manifest);
  d.pixels_ = std::move(pixels);
  d.actions_raw_ = std::move(raw);
  d.actions_norm_ = std::move(norm);
  return d;
}

}  // namespace gatenav::expert
