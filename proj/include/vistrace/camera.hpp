#pragma once

// Camera geometry: the uvw viewing basis, pinhole and thin-lens ray
// generation, and pixel projection intrinsics.
//
// Conventions: the camera sits at `origin` looking along -w. The camera
// frame used for projection is x_c = u, y_c = -v, z_c = -w (right-handed,
// +z into the scene, image y growing downward), so a point with camera
// coordinates (x, y, z), z > 0, lands at pixel (fx*x/z + ox, fy*y/z + oy).

#include <cstdint>

#include "vistrace/math.hpp"
#include "vistrace/sampler.hpp"

namespace vistrace {

struct CameraIntrinsics {
  double fx = 1, fy = 1;  // focal lengths, pixels
  double ox = 0, oy = 0;  // principal point, pixels
  // skew is fixed at zero (square-pixel model)
};

struct CameraBasis {
  Vec3 u, v, w;
};

// w points from target back to the eye; u = up x w; v = w x u.
// {u, v, w} is orthonormal and right-handed.
CameraBasis camera_basis(const Vec3& origin, const Vec3& target, const Vec3& up);

enum class CameraKind { pinhole, thin_lens };

struct CameraModel {
  CameraKind kind = CameraKind::pinhole;
  Vec3 origin;
  CameraBasis basis;
  double fov = deg_to_rad(45.0);  // vertical field of view, radians
  int width = 256, height = 256;
  double aperture = 0.0;        // lens radius, scene units
  double focus_distance = 1.0;  // plane in sharp focus, scene units

  CameraIntrinsics intrinsics() const {
    const double f = height / (2.0 * std::tan(fov / 2.0));
    return {f, f, width / 2.0, height / 2.0};
  }

  // World -> camera-frame rotation (rows u, -v, -w).
  Rotation3 world_to_camera() const;

  // Pose whose homography K [R | t] projects world points into this camera.
  Pose pose() const;
};

CameraModel make_camera(const Vec3& origin, const Vec3& target, const Vec3& up,
                        double fov, int width, int height);

// Primary ray through pixel (px, py); offsets in [0,1)^2 jitter within the
// pixel (0.5, 0.5 is the center).
Ray pinhole_ray(const CameraModel& cam, double px, double py);

// Thin-lens ray: uniform sample on the aperture disk, aimed at the pixel's
// point on the focus plane. aperture = 0 degenerates to the pinhole ray.
Ray thin_lens_ray(const CameraModel& cam, double px, double py, Rng& rng);

Ray camera_ray(const CameraModel& cam, double px, double py, Rng& rng);

// Lens equation: view-plane distance z0 = f d_f / (d_f - f). Requires d_f > f.
double thin_lens_image_distance(double focal_length, double focus_distance);

// Project a world point into pixel coordinates (throws std::domain_error if
// the point is at or behind the camera plane).
void project_point(const CameraModel& cam, const Vec3& p, double& px, double& py);

}  // namespace vistrace
