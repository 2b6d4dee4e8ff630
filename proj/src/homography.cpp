#include "vistrace/homography.hpp"

namespace vistrace {

Homography pose_to_homography(const Pose& x, const CameraIntrinsics& k) {
  if (!is_finite(x.t)) throw std::invalid_argument("pose_to_homography: non-finite t");
  return homography_from_rt(crp_to_rotation(x.q), x.t, k);
}

Homography homography_from_rt(const Rotation3& r, const Vec3& t,
                              const CameraIntrinsics& k) {
  Homography h;
  // K rows applied to [R | t]; skew is zero.
  for (int c = 0; c < 3; ++c) {
    h[0 + c] = k.fx * r.m[0][c] + k.ox * r.m[2][c];
    h[4 + c] = k.fy * r.m[1][c] + k.oy * r.m[2][c];
    h[8 + c] = r.m[2][c];
  }
  h[3] = k.fx * t.x + k.ox * t.z;
  h[7] = k.fy * t.y + k.oy * t.z;
  h[11] = t.z;
  return h;
}

double projection_depth(const Homography& h, const Vec3& p) {
  return h[8] * p.x + h[9] * p.y + h[10] * p.z + h[11];
}

void project(const Homography& h, const Vec3& p, double& u, double& v) {
  const double s = projection_depth(h, p);
  if (std::abs(s) < 1e-12)
    throw std::domain_error("project: degenerate depth factor");
  u = (h[0] * p.x + h[1] * p.y + h[2] * p.z + h[3]) / s;
  v = (h[4] * p.x + h[5] * p.y + h[6] * p.z + h[7]) / s;
}

}  // namespace vistrace
