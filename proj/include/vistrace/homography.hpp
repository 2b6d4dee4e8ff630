#pragma once

// The 3x4 projection matrix H = K [R | t] flattened to h1..h12, and the
// rational pixel evaluation u = (h1 x + h2 y + h3 z + h4) / s,
// v = (h5 x + h6 y + h7 z + h8) / s with s = h9 x + h10 y + h11 z + h12.

#include <array>

#include "vistrace/camera.hpp"
#include "vistrace/math.hpp"

namespace vistrace {

struct Homography {
  std::array<double, 12> h{};  // row-major 3x4

  double operator[](int i) const { return h[i]; }
  double& operator[](int i) { return h[i]; }
};

Homography pose_to_homography(const Pose& x, const CameraIntrinsics& k);

// Same assembly from an explicit rotation (usable at the CRP singularity).
Homography homography_from_rt(const Rotation3& r, const Vec3& t,
                              const CameraIntrinsics& k);

// Depth factor of p under H. Chirality expects s > 0.
double projection_depth(const Homography& h, const Vec3& p);

// Throws std::domain_error when |s| < 1e-12 (degenerate depth / behind camera).
void project(const Homography& h, const Vec3& p, double& u, double& v);

}  // namespace vistrace
