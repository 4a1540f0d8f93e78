#pragma once

#include "gatenav/common/error.hpp"
#include "gatenav/numerics/rng.hpp"

namespace gatenav::scene {

struct Rgb {
  float r = 0.0f, g = 0.0f, b = 0.0f;
};

// Procedural environment: a square gate frame in front of a flat-shaded
// ground plane and a vertical sky gradient.
struct SceneParams {
  double gate_side = 1.5;      // outer side length, meters
  double bar_thickness = 0.15; // frame bar width, meters

  Rgb gate_color{0.90f, 0.30f, 0.10f};
  Rgb ground_color{0.24f, 0.50f, 0.20f};
  Rgb sky_top{0.30f, 0.52f, 0.92f};
  Rgb sky_bottom{0.72f, 0.84f, 0.98f};

  // Per-sample multiplicative color jitter fractions.
  double gate_jitter = 0.10;
  double ground_jitter = 0.15;
  double sky_jitter = 0.15;

  // Camera perturbation ranges used when sampling labeled views.
  double roll_range = 0.15;   // radians, +/-
  double pitch_range = 0.15;  // radians, +/-

  // Rasterizer supersampling factor (box-filtered down).
  int supersample = 2;

  void validate() const {
    if (!(gate_side > 2.0 * bar_thickness && bar_thickness > 0.0))
      throw ConfigError("scene: require gate_side > 2*bar_thickness > 0");
    for (const Rgb* c : {&gate_color, &ground_color, &sky_top, &sky_bottom}) {
      for (float v : {c->r, c->g, c->b})
        if (v < 0.0f || v > 1.0f) throw ConfigError("scene: colors must lie in [0,1]");
    }
    if (supersample < 1) throw ConfigError("scene: supersample must be >= 1");
  }
};

// One concrete appearance draw (jittered colors, clamped to [0,1]).
struct ResolvedColors {
  Rgb gate, ground, sky_top, sky_bottom;
};

ResolvedColors sample_colors(const SceneParams& scene, Rng& rng);
// The un-jittered base appearance.
ResolvedColors base_colors(const SceneParams& scene);

}  // namespace gatenav::scene
