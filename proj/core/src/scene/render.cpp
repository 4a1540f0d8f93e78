#include "gatenav/scene/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace gatenav::scene {

namespace {

float jitter1(float base, double frac, Rng& rng) {
  const double f = 1.0 + rng.uniform(-frac, frac);
  return std::clamp(static_cast<float>(base * f), 0.0f, 1.0f);
}

Rgb jitter_rgb(const Rgb& c, double frac, Rng& rng) {
  return {jitter1(c.r, frac, rng), jitter1(c.g, frac, rng), jitter1(c.b, frac, rng)};
}

// Camera-to-body rotation: roll about the forward axis, then pitch about the
// left axis with positive pitch tilting the view up.
struct CamRot {
  double m[3][3];

  static CamRot from(double roll, double pitch) {
    const double cr = std::cos(roll), sr = std::sin(roll);
    const double cp = std::cos(pitch), sp = std::sin(pitch);
    // Ry(-pitch) * Rx(roll): positive pitch tilts the view up.
    CamRot r;
    r.m[0][0] = cp;
    r.m[0][1] = -sp * sr;
    r.m[0][2] = -sp * cr;
    r.m[1][0] = 0.0;
    r.m[1][1] = cr;
    r.m[1][2] = -sr;
    r.m[2][0] = sp;
    r.m[2][1] = cp * sr;
    r.m[2][2] = cp * cr;
    return r;
  }

  Vec3 cam_to_body(const Vec3& v) const {
    return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z, m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
  }

  Vec3 body_to_cam(const Vec3& v) const {
    return {m[0][0] * v.x + m[1][0] * v.y + m[2][0] * v.z, m[0][1] * v.x + m[1][1] * v.y + m[2][1] * v.z,
            m[0][2] * v.x + m[1][2] * v.y + m[2][2] * v.z};
  }
};

constexpr double kNearPlane = 0.05;

// Clip a convex polygon (camera frame) against x >= kNearPlane.
std::vector<Vec3> clip_near(const std::vector<Vec3>& poly) {
  std::vector<Vec3> out;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec3& a = poly[i];
    const Vec3& b = poly[(i + 1) % n];
    const bool ain = a.x >= kNearPlane;
    const bool bin = b.x >= kNearPlane;
    if (ain) out.push_back(a);
    if (ain != bin) {
      const double t = (kNearPlane - a.x) / (b.x - a.x);
      out.push_back(a + t * (b - a));
    }
  }
  return out;
}

struct Framebuffer {
  int w = 0, h = 0;
  std::vector<float> rgb;  // interleaved, w*h*3

  void fill_pixel(int x, int y, const Rgb& c) {
    float* p = rgb.data() + (static_cast<size_t>(y) * w + x) * 3;
    p[0] = c.r;
    p[1] = c.g;
    p[2] = c.b;
  }
};

// Scanline fill; pixel centers at (x+0.5, y+0.5).
void fill_polygon(Framebuffer& fb, const std::vector<double>& us, const std::vector<double>& vs, const Rgb& color) {
  const size_t n = us.size();
  if (n < 3) return;
  double vmin = vs[0], vmax = vs[0];
  for (double v : vs) {
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  const int y0 = std::max(0, static_cast<int>(std::floor(vmin - 0.5)));
  const int y1 = std::min(fb.h - 1, static_cast<int>(std::ceil(vmax)));
  std::vector<double> xs;
  for (int y = y0; y <= y1; ++y) {
    const double yc = y + 0.5;
    xs.clear();
    for (size_t i = 0; i < n; ++i) {
      const double ua = us[i], va = vs[i];
      const double ub = us[(i + 1) % n], vb = vs[(i + 1) % n];
      if ((va <= yc && vb > yc) || (vb <= yc && va > yc)) {
        const double t = (yc - va) / (vb - va);
        xs.push_back(ua + t * (ub - ua));
      }
    }
    std::sort(xs.begin(), xs.end());
    for (size_t i = 0; i + 1 < xs.size(); i += 2) {
      int x0 = static_cast<int>(std::ceil(xs[i] - 0.5));
      int x1 = static_cast<int>(std::floor(xs[i + 1] - 0.5));
      x0 = std::max(x0, 0);
      x1 = std::min(x1, fb.w - 1);
      for (int x = x0; x <= x1; ++x) fb.fill_pixel(x, y, color);
    }
  }
}

void draw_quad(Framebuffer& fb, const CamRot& rot, double fx, double fy, double cx, double cy,
               const std::array<Vec3, 4>& corners_body, const Rgb& color) {
  std::vector<Vec3> cam(4);
  for (int i = 0; i < 4; ++i) cam[static_cast<size_t>(i)] = rot.body_to_cam(corners_body[static_cast<size_t>(i)]);
  std::vector<Vec3> clipped = clip_near(cam);
  if (clipped.size() < 3) return;
  std::vector<double> us(clipped.size()), vs(clipped.size());
  for (size_t i = 0; i < clipped.size(); ++i) {
    us[i] = cx - fx * clipped[i].y / clipped[i].x;
    vs[i] = cy - fy * clipped[i].z / clipped[i].x;
  }
  fill_polygon(fb, us, vs, color);
}

}  // namespace

ResolvedColors base_colors(const SceneParams& scene) {
  return {scene.gate_color, scene.ground_color, scene.sky_top, scene.sky_bottom};
}

ResolvedColors sample_colors(const SceneParams& scene, Rng& rng) {
  ResolvedColors c;
  c.gate = jitter_rgb(scene.gate_color, scene.gate_jitter, rng);
  c.ground = jitter_rgb(scene.ground_color, scene.ground_jitter, rng);
  c.sky_top = jitter_rgb(scene.sky_top, scene.sky_jitter, rng);
  c.sky_bottom = jitter_rgb(scene.sky_bottom, scene.sky_jitter, rng);
  return c;
}

bool project_point(const CameraIntrinsics& cam, double roll, double pitch, const Vec3& body_point, double& u,
                   double& v) {
  const CamRot rot = CamRot::from(roll, pitch);
  const Vec3 q = rot.body_to_cam(body_point);
  if (q.x < kNearPlane) return false;
  u = cam.cx() - cam.fx() * q.y / q.x;
  v = cam.cy() - cam.fy() * q.z / q.x;
  return true;
}

Tensor render(const CameraIntrinsics& cam, const SceneParams& scene, const ResolvedColors& colors,
              const RelativeGatePose& pose, double roll, double pitch) {
  cam.validate();
  scene.validate();

  const int ss = scene.supersample;
  const int w = cam.width * ss, h = cam.height * ss;
  const double fx = cam.fx() * ss, fy = cam.fy() * ss;
  const double cx = cam.cx() * ss, cy = cam.cy() * ss;
  const CamRot rot = CamRot::from(roll, pitch);

  Framebuffer fb;
  fb.w = w;
  fb.h = h;
  fb.rgb.resize(static_cast<size_t>(w) * h * 3);

  // Background: sky gradient above the horizon, flat ground below. The
  // horizon is the zero-elevation locus in the body frame, so only roll and
  // pitch move it.
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Vec3 d_cam{1.0, -((x + 0.5) - cx) / fx, -((y + 0.5) - cy) / fy};
      const Vec3 d = rot.cam_to_body(d_cam);
      const double elev = d.z / d.norm();
      if (elev >= 0.0) {
        const float t = static_cast<float>(std::min(1.0, elev));
        const Rgb c{colors.sky_bottom.r + t * (colors.sky_top.r - colors.sky_bottom.r),
                    colors.sky_bottom.g + t * (colors.sky_top.g - colors.sky_bottom.g),
                    colors.sky_bottom.b + t * (colors.sky_top.b - colors.sky_bottom.b)};
        fb.fill_pixel(x, y, c);
      } else {
        fb.fill_pixel(x, y, colors.ground);
      }
    }
  }

  // Gate frame: center from the spherical pose, plane normal horizontal at
  // relative yaw psi, in-plane axes horizontal (hdir) and vertical (z).
  const Vec3 center = spherical_to_cartesian(pose);
  const Vec3 hdir{-std::sin(pose.psi), std::cos(pose.psi), 0.0};
  const Vec3 up{0.0, 0.0, 1.0};
  const double half = scene.gate_side / 2.0;
  const double bar = scene.bar_thickness;

  auto quad = [&](double h0, double h1, double v0, double v1) {
    return std::array<Vec3, 4>{center + h0 * hdir + v0 * up, center + h1 * hdir + v0 * up,
                               center + h1 * hdir + v1 * up, center + h0 * hdir + v1 * up};
  };
  // Side bars span the full height; top/bottom bars fill the inner width.
  draw_quad(fb, rot, fx, fy, cx, cy, quad(-half, -half + bar, -half, half), colors.gate);
  draw_quad(fb, rot, fx, fy, cx, cy, quad(half - bar, half, -half, half), colors.gate);
  draw_quad(fb, rot, fx, fy, cx, cy, quad(-half + bar, half - bar, half - bar, half), colors.gate);
  draw_quad(fb, rot, fx, fy, cx, cy, quad(-half + bar, half - bar, -half, -half + bar), colors.gate);

  // Box-filter down to the output resolution, CHW layout.
  Tensor out({3, cam.height, cam.width});
  const float inv = 1.0f / static_cast<float>(ss * ss);
  for (int y = 0; y < cam.height; ++y) {
    for (int x = 0; x < cam.width; ++x) {
      float acc[3] = {0.0f, 0.0f, 0.0f};
      for (int sy = 0; sy < ss; ++sy) {
        const float* row = fb.rgb.data() + (static_cast<size_t>(y * ss + sy) * w + static_cast<size_t>(x) * ss) * 3;
        for (int sx = 0; sx < ss; ++sx) {
          acc[0] += row[sx * 3 + 0];
          acc[1] += row[sx * 3 + 1];
          acc[2] += row[sx * 3 + 2];
        }
      }
      for (int c = 0; c < 3; ++c)
        out.at((static_cast<int64_t>(c) * cam.height + y) * cam.width + x) = acc[c] * inv;
    }
  }
  return out;
}

Tensor render(const CameraIntrinsics& cam, const SceneParams& scene, const RelativeGatePose& pose, double roll,
              double pitch, Rng& rng) {
  const ResolvedColors colors = sample_colors(scene, rng);
  return render(cam, scene, colors, pose, roll, pitch);
}

}  // namespace gatenav::scene
