#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "gatenav/common/error.hpp"
#include "gatenav/io/ppm.hpp"
#include "gatenav/scene/dataset.hpp"
#include "gatenav/scene/render.hpp"

using namespace gatenav;
using namespace gatenav::scene;

namespace {

SceneParams no_jitter_scene() {
  SceneParams s;
  s.gate_jitter = 0.0;
  s.ground_jitter = 0.0;
  s.sky_jitter = 0.0;
  return s;
}

bool is_gate_pixel(const Tensor& img, int y, int x) {
  const int h = img.dim(1), w = img.dim(2);
  const float r = img.at((0 * h + y) * w + x);
  const float g = img.at((1 * h + y) * w + x);
  const float b = img.at((2 * h + y) * w + x);
  // The gate is the only strongly red element in the scene.
  return r > 0.55f && r > g + 0.2f && r > b + 0.2f;
}

struct Bbox {
  int x0 = 1 << 30, x1 = -1, y0 = 1 << 30, y1 = -1;
  bool any() const { return x1 >= 0; }
  double cx() const { return (x0 + x1) / 2.0; }
  double cy() const { return (y0 + y1) / 2.0; }
  int width() const { return x1 - x0 + 1; }
};

Bbox gate_bbox(const Tensor& img) {
  Bbox b;
  for (int y = 0; y < img.dim(1); ++y)
    for (int x = 0; x < img.dim(2); ++x)
      if (is_gate_pixel(img, y, x)) {
        b.x0 = std::min(b.x0, x);
        b.x1 = std::max(b.x1, x);
        b.y0 = std::min(b.y0, y);
        b.y1 = std::max(b.y1, y);
      }
  return b;
}

}  // namespace

TEST(Spherical, CanonicalDirections) {
  const Vec3 ahead = spherical_to_cartesian({5.0, 0.0, M_PI / 2.0, 0.0});
  EXPECT_NEAR(ahead.x, 5.0, 1e-12);
  EXPECT_NEAR(ahead.y, 0.0, 1e-12);
  EXPECT_NEAR(ahead.z, 0.0, 1e-12);

  const Vec3 left = spherical_to_cartesian({2.0, M_PI / 2.0, M_PI / 2.0, 0.0});
  EXPECT_NEAR(left.x, 0.0, 1e-12);
  EXPECT_NEAR(left.y, 2.0, 1e-12);
  EXPECT_NEAR(left.z, 0.0, 1e-12);

  const Vec3 up = spherical_to_cartesian({1.0, 0.0, 1e-9, 0.0});
  EXPECT_NEAR(up.x, 0.0, 1e-8);
  EXPECT_NEAR(up.z, 1.0, 1e-8);
}

TEST(Spherical, InverseAndRoundTrip) {
  const RelativeGatePose p = cartesian_to_spherical({5.0, 0.0, 0.0}, 1.2, 1.2);
  EXPECT_NEAR(p.r, 5.0, 1e-12);
  EXPECT_NEAR(p.theta, 0.0, 1e-12);
  EXPECT_NEAR(p.phi, M_PI / 2.0, 1e-12);
  EXPECT_NEAR(p.psi, 0.0, 1e-12);

  Rng rng(31);
  for (int i = 0; i < 500; ++i) {
    const Vec3 v{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10)};
    if (v.norm() < 1e-3) continue;
    const RelativeGatePose q = cartesian_to_spherical(v, 0.7, 0.2);
    const Vec3 back = spherical_to_cartesian(q);
    EXPECT_NEAR(back.x, v.x, 1e-6);
    EXPECT_NEAR(back.y, v.y, 1e-6);
    EXPECT_NEAR(back.z, v.z, 1e-6);
  }
}

TEST(Spherical, PoleCaseClampsPhi) {
  const RelativeGatePose p = cartesian_to_spherical({0.0, 0.0, 3.0}, 0.0, 0.0);
  EXPECT_GT(p.phi, 0.0);
  EXPECT_NEAR(p.r, 3.0, 1e-12);
  EXPECT_THROW(cartesian_to_spherical({0.0, 0.0, 0.0}, 0.0, 0.0), DataError);
}

TEST(SamplePose, DegenerateRangesGiveConstantPose) {
  PoseRanges r;
  r.r_min = r.r_max = 4.0;
  r.theta_min = r.theta_max = 0.1;
  r.phi_min = r.phi_max = M_PI / 2.0;
  r.psi_min = r.psi_max = -0.3;
  r.roll_min = r.roll_max = 0.0;
  r.pitch_min = r.pitch_max = 0.0;
  Rng rng(9);
  for (int i = 0; i < 10; ++i) {
    const SampledView v = sample_pose(rng, r);
    EXPECT_DOUBLE_EQ(v.pose.r, 4.0);
    EXPECT_DOUBLE_EQ(v.pose.theta, 0.1);
    EXPECT_DOUBLE_EQ(v.pose.psi, -0.3);
  }
}

TEST(SamplePose, DrawsStayInsideRanges) {
  CameraIntrinsics cam;
  const PoseRanges r = default_pose_ranges(cam, SceneParams{});
  Rng rng(10);
  for (int i = 0; i < 10000; ++i) {
    const SampledView v = sample_pose(rng, r);
    EXPECT_GE(v.pose.r, r.r_min);
    EXPECT_LT(v.pose.r, r.r_max);
    EXPECT_GE(v.pose.theta, r.theta_min);
    EXPECT_LT(v.pose.theta, r.theta_max);
    EXPECT_GE(v.pose.phi, r.phi_min);
    EXPECT_LT(v.pose.phi, r.phi_max);
    EXPECT_GE(v.pose.psi, r.psi_min);
    EXPECT_LT(v.pose.psi, r.psi_max);
    EXPECT_GE(v.roll, r.roll_min);
    EXPECT_LE(v.roll, r.roll_max);
  }
}

TEST(SamplePose, FixedSeedIdenticalSequence) {
  const PoseRanges r = default_pose_ranges(CameraIntrinsics{}, SceneParams{});
  Rng a(11, 2), b(11, 2);
  for (int i = 0; i < 50; ++i) {
    const SampledView va = sample_pose(a, r);
    const SampledView vb = sample_pose(b, r);
    EXPECT_DOUBLE_EQ(va.pose.r, vb.pose.r);
    EXPECT_DOUBLE_EQ(va.pose.psi, vb.pose.psi);
    EXPECT_DOUBLE_EQ(va.pitch, vb.pitch);
  }
  EXPECT_THROW(sample_pose(a, PoseRanges{.r_min = 5, .r_max = 2}), ConfigError);
}

TEST(Render, CenteredGateIsCentered) {
  CameraIntrinsics cam{64, 64, 1.2};
  const SceneParams scene = no_jitter_scene();
  const Tensor img = render(cam, scene, base_colors(scene), {5.0, 0.0, M_PI / 2.0, 0.0}, 0.0, 0.0);
  const Bbox b = gate_bbox(img);
  ASSERT_TRUE(b.any());
  EXPECT_NEAR(b.cx(), 32.0 - 0.5, 1.0);
  EXPECT_NEAR(b.cy(), 32.0 - 0.5, 1.0);
}

TEST(Render, DoublingDistanceHalvesWidth) {
  CameraIntrinsics cam{96, 96, 1.0};
  const SceneParams scene = no_jitter_scene();
  const Tensor near_img = render(cam, scene, base_colors(scene), {3.0, 0.0, M_PI / 2.0, 0.0}, 0.0, 0.0);
  const Tensor far_img = render(cam, scene, base_colors(scene), {6.0, 0.0, M_PI / 2.0, 0.0}, 0.0, 0.0);
  const int w_near = gate_bbox(near_img).width();
  const int w_far = gate_bbox(far_img).width();
  EXPECT_NEAR(static_cast<double>(w_near) / w_far, 2.0, 0.2);
}

TEST(Render, ProjectedWidthMonotoneInDistance) {
  // High enough resolution that 1 m distance steps survive pixel rounding;
  // hard edges so the bbox measurement is exact.
  CameraIntrinsics cam{128, 128, 1.0471975511965976};
  SceneParams scene = no_jitter_scene();
  scene.supersample = 1;
  int prev = 1 << 30;
  for (double r = 2.0; r <= 10.01; r += 1.0) {
    const Tensor img = render(cam, scene, base_colors(scene), {r, 0.0, M_PI / 2.0, 0.0}, 0.0, 0.0);
    const int w = gate_bbox(img).width();
    EXPECT_LT(w, prev) << "r=" << r;
    prev = w;
  }
}

TEST(Render, CornerMatchesHandProjection) {
  // Gate corner at body (5, 1, 0.5): u = cx + fx*(-y/x), v = cy + fy*(-z/x).
  CameraIntrinsics cam{128, 128, 1.1};
  double u = 0.0, v = 0.0;
  ASSERT_TRUE(project_point(cam, 0.0, 0.0, {5.0, 1.0, 0.5}, u, v));
  const double fx = (128.0 / 2.0) / std::tan(1.1 / 2.0);
  EXPECT_NEAR(u, 64.0 + fx * (-1.0 / 5.0), 1e-9);
  EXPECT_NEAR(v, 64.0 + fx * (-0.5 / 5.0), 1e-9);

  // The rendered top-right gate pixl cluster should sit near the projected
  // outer corner: verify against the rendered bbox edges within a pixel.
  const SceneParams scene = no_jitter_scene();
  const RelativeGatePose pose{5.0, 0.0, M_PI / 2.0, 0.0};
  const Tensor img = render(cam, scene, base_colors(scene), pose, 0.0, 0.0);
  const Bbox b = gate_bbox(img);
  double u_corner = 0.0, v_corner = 0.0;
  ASSERT_TRUE(project_point(cam, 0.0, 0.0, {5.0, scene.gate_side / 2.0, scene.gate_side / 2.0}, u_corner, v_corner));
  EXPECT_NEAR(b.x0, u_corner - 0.5, 1.0);  // left edge projects at -y/x
  EXPECT_NEAR(b.y0, v_corner - 0.5, 1.0);
}

TEST(Render, PitchMovesHorizonDown) {
  CameraIntrinsics cam{32, 32, 1.2};
  const SceneParams scene = no_jitter_scene();
  // No gate in view: look straight with gate far behind via theta = pi.
  const RelativeGatePose away{5.0, M_PI, M_PI / 2.0, 0.0};
  auto horizon_row = [&](double pitch) {
    const Tensor img = render(cam, scene, base_colors(scene), away, 0.0, pitch);
    for (int y = 0; y < 32; ++y) {
      const float g = img.at((1 * 32 + y) * 32 + 16);
      const float b = img.at((2 * 32 + y) * 32 + 16);
      if (g > b) return y;  // first ground row
    }
    return 32;
  };
  EXPECT_LT(horizon_row(0.0), horizon_row(0.3));
  EXPECT_GT(horizon_row(0.0), horizon_row(-0.3));
}

TEST(Render, BehindCameraIsBackgroundOnly) {
  CameraIntrinsics cam{32, 32, 1.2};
  const SceneParams scene = no_jitter_scene();
  const Tensor img = render(cam, scene, base_colors(scene), {5.0, M_PI, M_PI / 2.0, 0.0}, 0.0, 0.0);
  EXPECT_FALSE(gate_bbox(img).any());
}

TEST(Dataset, GenerateLoadRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "gatenav_ds_roundtrip";
  std::filesystem::remove_all(dir);
  CameraIntrinsics cam{16, 16, 1.2};
  SceneParams scene;
  const PoseRanges ranges = default_pose_ranges(cam, scene);
  Rng rng(77);
  const DatasetManifest m = generate_dataset(50, rng, cam, scene, ranges, dir);
  EXPECT_EQ(m.n, 50);

  const Dataset ds = load_dataset(dir);
  EXPECT_EQ(ds.size(), 50);
  Rng rng2(77);
  for (int64_t i = 0; i < ds.size(); ++i) {
    Rng sub = rng2.fork(static_cast<uint64_t>(i));
    const SampledView expect = sample_pose(sub, ranges);
    EXPECT_NEAR(ds.view(i).pose.r, expect.pose.r, 1e-6);
    EXPECT_NEAR(ds.view(i).pose.theta, expect.pose.theta, 1e-6);
    EXPECT_NEAR(ds.view(i).pose.phi, expect.pose.phi, 1e-6);
    EXPECT_NEAR(ds.view(i).pose.psi, expect.pose.psi, 1e-6);
    const LabeledSample s = ds.sample(i);
    for (int64_t k = 0; k < s.image.size(); ++k) {
      EXPECT_GE(s.image.at(k), 0.0f);
      EXPECT_LE(s.image.at(k), 1.0f);
    }
  }
  std::filesystem::remove_all(dir);
}

TEST(Dataset, DeterministicBytes) {
  const auto dir_a = std::filesystem::temp_directory_path() / "gatenav_ds_a";
  const auto dir_b = std::filesystem::temp_directory_path() / "gatenav_ds_b";
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);
  CameraIntrinsics cam{16, 16, 1.2};
  SceneParams scene;
  const PoseRanges ranges = default_pose_ranges(cam, scene);
  Rng ra(5), rb(5);
  generate_dataset(40, ra, cam, scene, ranges, dir_a, 1);
  generate_dataset(40, rb, cam, scene, ranges, dir_b, 4);  // thread count must not matter

  for (const char* name : {"images.bin", "poses.csv", "manifest.json"}) {
    std::ifstream fa(dir_a / name, std::ios::binary), fb(dir_b / name, std::ios::binary);
    const std::string a((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
    const std::string b((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
    EXPECT_EQ(a, b) << name;
  }
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);
}

TEST(Dataset, EmptyDatasetIsValid) {
  const auto dir = std::filesystem::temp_directory_path() / "gatenav_ds_empty";
  std::filesystem::remove_all(dir);
  CameraIntrinsics cam{16, 16, 1.2};
  SceneParams scene;
  Rng rng(1);
  generate_dataset(0, rng, cam, scene, default_pose_ranges(cam, scene), dir);
  const Dataset ds = load_dataset(dir);
  EXPECT_EQ(ds.size(), 0);
  std::filesystem::remove_all(dir);
}

TEST(Dataset, TruncatedImagesNamesFirstIncompleteRecord) {
  const auto dir = std::filesystem::temp_directory_path() / "gatenav_ds_trunc";
  std::filesystem::remove_all(dir);
  CameraIntrinsics cam{16, 16, 1.2};
  SceneParams scene;
  Rng rng(2);
  generate_dataset(10, rng, cam, scene, default_pose_ranges(cam, scene), dir);
  // Cut into the middle of record 7.
  const auto img_path = dir / "images.bin";
  std::filesystem::resize_file(img_path, 7 * 16 * 16 * 3 + 100);
  try {
    load_dataset(dir);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("record 7"), std::string::npos) << e.what();
  }
  std::filesystem::remove_all(dir);
}

TEST(Ppm, WritesValidHeaderAndPixels) {
  const auto path = std::filesystem::temp_directory_path() / "gatenav_test.ppm";
  Tensor img = Tensor::zeros({3, 2, 2});
  img.at(0) = 1.0f;  // red channel of pixel (0,0)
  write_ppm(path, img);
  std::ifstream is(path, std::ios::binary);
  std::string magic;
  is >> magic;
  EXPECT_EQ(magic, "P6");
  int w = 0, h = 0, maxval = 0;
  is >> w >> h >> maxval;
  EXPECT_EQ(w, 2);
  EXPECT_EQ(h, 2);
  EXPECT_EQ(maxval, 255);
  is.get();
  unsigned char px[12];
  is.read(reinterpret_cast<char*>(px), 12);
  EXPECT_EQ(px[0], 255);
  EXPECT_EQ(px[1], 0);
  std::filesystem::remove(path);
}
