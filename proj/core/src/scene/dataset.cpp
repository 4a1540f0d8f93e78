#include "gatenav/scene/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gatenav/common/error.hpp"
#include "gatenav/io/parallel.hpp"

namespace gatenav::scene {

using nlohmann::json;

void PoseRanges::validate() const {
  auto ordered = [](double lo, double hi) { return lo <= hi; };
  if (!(ordered(r_min, r_max) && ordered(theta_min, theta_max) && ordered(phi_min, phi_max) &&
        ordered(psi_min, psi_max) && ordered(roll_min, roll_max) && ordered(pitch_min, pitch_max)))
    throw ConfigError("pose ranges: each interval must satisfy min <= max");
  if (!(r_min > 0.0)) throw ConfigError("pose ranges: r_min must be positive");
  if (!(phi_min > 0.0 && phi_max < M_PI)) throw ConfigError("pose ranges: phi must stay inside (0, pi)");
  if (theta_min < -M_PI || theta_max > M_PI) throw ConfigError("pose ranges: theta outside (-pi, pi]");
}

PoseRanges default_pose_ranges(const CameraIntrinsics& cam, const SceneParams& scene) {
  PoseRanges r;
  r.theta_max = cam.hfov / 2.4;
  r.theta_min = -r.theta_max;
  r.roll_min = -scene.roll_range;
  r.roll_max = scene.roll_range;
  r.pitch_min = -scene.pitch_range;
  r.pitch_max = scene.pitch_range;
  return r;
}

SampledView sample_pose(Rng& rng, const PoseRanges& ranges) {
  ranges.validate();
  SampledView v;
  v.pose.r = rng.uniform(ranges.r_min, ranges.r_max);
  v.pose.theta = rng.uniform(ranges.theta_min, ranges.theta_max);
  v.pose.phi = rng.uniform(ranges.phi_min, ranges.phi_max);
  v.pose.psi = rng.uniform(ranges.psi_min, ranges.psi_max);
  v.roll = rng.uniform(ranges.roll_min, ranges.roll_max);
  v.pitch = rng.uniform(ranges.pitch_min, ranges.pitch_max);
  return v;
}

uint8_t quantize_u8(float v) {
  return static_cast<uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
}

namespace {

json ranges_to_json(const PoseRanges& r) {
  return json{{"r_min", r.r_min},         {"r_max", r.r_max},     {"theta_min", r.theta_min},
              {"theta_max", r.theta_max}, {"phi_min", r.phi_min}, {"phi_max", r.phi_max},
              {"psi_min", r.psi_min},     {"psi_max", r.psi_max}, {"roll_min", r.roll_min},
              {"roll_max", r.roll_max},   {"pitch_min", r.pitch_min}, {"pitch_max", r.pitch_max}};
}

PoseRanges ranges_from_json(const json& j) {
  PoseRanges r;
  r.r_min = j.at("r_min");
  r.r_max = j.at("r_max");
  r.theta_min = j.at("theta_min");
  r.theta_max = j.at("theta_max");
  r.phi_min = j.at("phi_min");
  r.phi_max = j.at("phi_max");
  r.psi_min = j.at("psi_min");
  r.psi_max = j.at("psi_max");
  r.roll_min = j.at("roll_min");
  r.roll_max = j.at("roll_max");
  r.pitch_min = j.at("pitch_min");
  r.pitch_max = j.at("pitch_max");
  return r;
}

void write_poses_csv(const std::filesystem::path& path, const std::vector<SampledView>& views) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw DataError("cannot open for writing: " + path.string());
  os << "r,theta,phi,psi,roll,pitch\n";
  char line[256];
  for (const auto& v : views) {
    std::snprintf(line, sizeof(line), "%.9f,%.9f,%.9f,%.9f,%.9f,%.9f\n", v.pose.r, v.pose.theta, v.pose.phi,
                  v.pose.psi, v.roll, v.pitch);
    os << line;
  }
  if (!os) throw DataError("write failed: " + path.string());
}

std::vector<SampledView> read_poses_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open: " + path.string());
  std::string line;
  if (!std::getline(is, line)) throw DataError("empty poses.csv: " + path.string());
  std::vector<SampledView> views;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    SampledView v;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf", &v.pose.r, &v.pose.theta, &v.pose.phi, &v.pose.psi,
                    &v.roll, &v.pitch) != 6)
      throw DataError("malformed row in " + path.string() + ": " + line);
    views.push_back(v);
  }
  return views;
}

}  // namespace

DatasetManifest generate_dataset(int64_t n, Rng& rng, const CameraIntrinsics& cam, const SceneParams& scene,
                                 const PoseRanges& ranges, const std::filesystem::path& out_dir, int threads) {
  if (n < 0) throw ConfigError("generate_dataset: n must be >= 0");
  cam.validate();
  scene.validate();
  ranges.validate();
  std::filesystem::create_directories(out_dir);

  const int h = cam.height, w = cam.width;
  const size_t stride = static_cast<size_t>(h) * w * 3;
  std::vector<uint8_t> pixels(static_cast<size_t>(n) * stride);
  std::vector<SampledView> views(static_cast<size_t>(n));

  const Rng base = rng;
  try {
    parallel_for(n, threads, [&](int64_t i) {
      Rng sub = base.fork(static_cast<uint64_t>(i));
      const SampledView view = sample_pose(sub, ranges);
      const Tensor img = render(cam, scene, view.pose, view.roll, view.pitch, sub);
      views[static_cast<size_t>(i)] = view;
      uint8_t* dst = pixels.data() + static_cast<size_t>(i) * stride;
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          for (int c = 0; c < 3; ++c)
            dst[(static_cast<size_t>(y) * w + x) * 3 + c] =
                quantize_u8(img.at((static_cast<int64_t>(c) * h + y) * w + x));
    });

    {
      std::ofstream os(out_dir / "images.bin", std::ios::binary | std::ios::trunc);
      if (!os) throw DataError("cannot open for writing: " + (out_dir / "images.bin").string());
      os.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
      if (!os) throw DataError("write failed: " + (out_dir / "images.bin").string());
    }
    write_poses_csv(out_dir / "poses.csv", views);

    DatasetManifest m;
    m.n = n;
    m.height = h;
    m.width = w;
    m.seed = rng.seed();
    m.ranges = ranges;
    m.hfov = cam.hfov;
    json j{{"format_version", m.format_version}, {"n", m.n},       {"height", m.height}, {"width", m.width},
           {"seed", m.seed},                     {"hfov", m.hfov}, {"ranges", ranges_to_json(ranges)}};
    std::ofstream os(out_dir / "manifest.json", std::ios::trunc);
    if (!os) throw DataError("cannot open for writing: " + (out_dir / "manifest.json").string());
    os << j.dump(2) << "\n";
    if (!os) throw DataError("write failed: " + (out_dir / "manifest.json").string());
    return m;
  } catch (...) {
    // Do not leave a partial dataset behind.
    std::error_code ec;
    std::filesystem::remove(out_dir / "images.bin", ec);
    std::filesystem::remove(out_dir / "poses.csv", ec);
    std::filesystem::remove(out_dir / "manifest.json", ec);
    throw;
  }
}

LabeledSample Dataset::sample(int64_t i) const {
  LabeledSample s;
  s.image = Tensor({3, manifest_.height, manifest_.width});
  write_image(i, s.image.data());
  s.pose = views_[static_cast<size_t>(i)].pose;
  return s;
}

void Dataset::write_image(int64_t i, float* dst) const {
  const int h = manifest_.height, w = manifest_.width;
  const uint8_t* src = pixels_.data() + static_cast<size_t>(i) * h * w * 3;
  constexpr float kInv = 1.0f / 255.0f;
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        dst[(static_cast<int64_t>(c) * h + y) * w + x] = kInv * src[(static_cast<size_t>(y) * w + x) * 3 + c];
}

Dataset Dataset::load(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  std::ifstream ms(manifest_path);
  if (!ms) throw DataError("missing dataset manifest: " + manifest_path.string());
  json j;
  try {
    ms >> j;
  } catch (const json::exception& e) {
    throw DataError("malformed manifest " + manifest_path.string() + ": " + e.what());
  }
  DatasetManifest m;
  m.format_version = j.at("format_version");
  if (m.format_version != 1) throw DataError("unsupported dataset format_version in " + manifest_path.string());
  m.n = j.at("n");
  m.height = j.at("height");
  m.width = j.at("width");
  m.seed = j.at("seed");
  m.hfov = j.value("hfov", 0.0);
  m.ranges = ranges_from_json(j.at("ranges"));

  const auto images_path = dir / "images.bin";
  std::ifstream is(images_path, std::ios::binary);
  if (!is) throw DataError("missing images.bin: " + images_path.string());
  std::vector<uint8_t> pixels((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  const size_t stride = static_cast<size_t>(m.height) * m.width * 3;
  const size_t expected = static_cast<size_t>(m.n) * stride;
  if (pixels.size() != expected) {
    const size_t first_incomplete = stride == 0 ? 0 : pixels.size() / stride;
    throw DataError("corrupt images.bin in " + dir.string() + ": record " + std::to_string(first_incomplete) +
                    " incomplete (" + std::to_string(pixels.size()) + " of " + std::to_string(expected) + " bytes)");
  }

  std::vector<SampledView> views = read_poses_csv(dir / "poses.csv");
  if (static_cast<int64_t>(views.size()) != m.n)
    throw DataError("poses.csv row count " + std::to_string(views.size()) + " != manifest n " + std::to_string(m.n));

  return from_memory(std::move(m), std::move(pixels), std::move(views));
}

Dataset Dataset::from_memory(DatasetManifest manifest, std::vector<uint8_t> pixels, std::vector<SampledView> views) {
  Dataset d;
  d.manifest_ = std::move(manifest);
  d.pixels_ = std::move(pixels);
  d.views_ = std::move(views);
  return d;
}

Dataset load_dataset(const std::filesystem::path& dir) { return Dataset::load(dir); }

}  // namespace gatenav::scene
