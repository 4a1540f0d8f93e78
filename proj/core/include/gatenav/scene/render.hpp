#pragma once

#include "gatenav/numerics/rng.hpp"
#include "gatenav/numerics/tensor.hpp"
#include "gatenav/scene/camera.hpp"
#include "gatenav/scene/pose.hpp"
#include "gatenav/scene/scene.hpp"

namespace gatenav::scene {

// Rasterizes the onboard view for a given relative gate pose and camera
// roll/pitch perturbation. Painter's order: sky gradient, ground plane
// (horizon from roll/pitch), then the gate frame as four filled quads under
// pinhole perspective. Returns [3 x H x W] with values in [0,1]. A gate
// fully behind the camera yields a background-only image.
Tensor render(const CameraIntrinsics& cam, const SceneParams& scene, const ResolvedColors& colors,
              const RelativeGatePose& pose, double roll, double pitch);

// Convenience overload: draws jittered colors from rng first.
Tensor render(const CameraIntrinsics& cam, const SceneParams& scene, const RelativeGatePose& pose, double roll,
              double pitch, Rng& rng);

// Projects a body-frame point; returns false if behind the camera.
// u = cx + fx*(-y/x), v = cy + fy*(-z/x) for roll = pitch = 0.
bool project_point(const CameraIntrinsics& cam, double roll, double pitch, const Vec3& body_point, double& u,
                   double& v);

}  // namespace gatenav::scene
