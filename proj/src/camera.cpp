#include "vistrace/camera.hpp"

#include "vistrace/homography.hpp"

namespace vistrace {

CameraBasis camera_basis(const Vec3& origin, const Vec3& target, const Vec3& up) {
  const Vec3 view = origin - target;
  if (norm(view) < kTiny)
    throw std::invalid_argument("camera_basis: origin equals target");
  const Vec3 w = view / norm(view);
  const Vec3 ucross = cross(up, w);
  if (norm(ucross) < kTiny)
    throw std::invalid_argument("camera_basis: up is parallel to the view axis");
  const Vec3 u = ucross / norm(ucross);
  const Vec3 v = cross(w, u);
  return {u, v, w};
}

Rotation3 CameraModel::world_to_camera() const {
  Rotation3 r;
  const Vec3 rows[3] = {basis.u, -basis.v, -basis.w};
  for (int i = 0; i < 3; ++i) {
    r.m[i][0] = rows[i].x;
    r.m[i][1] = rows[i].y;
    r.m[i][2] = rows[i].z;
  }
  return r;
}

Pose CameraModel::pose() const {
  const Rotation3 r = world_to_camera();
  return {rotation_to_crp(r), r * (-origin)};
}

CameraModel make_camera(const Vec3& origin, const Vec3& target, const Vec3& up,
                        double fov, int width, int height) {
  if (fov <= 0.0 || fov >= kPi)
    throw std::invalid_argument("make_camera: fov must lie in (0, pi)");
  CameraModel cam;
  cam.origin = origin;
  cam.basis = camera_basis(origin, target, up);
  cam.fov = fov;
  cam.width = width;
  cam.height = height;
  cam.focus_distance = norm(target - origin);
  return cam;
}

// Unnormalized direction with unit depth along -w; scaling by a distance
// gives the point on the plane at that depth.
static Vec3 pixel_direction(const CameraModel& cam, double px, double py) {
  const CameraIntrinsics k = cam.intrinsics();
  const double xc = (px - k.ox) / k.fx;
  const double yc = (py - k.oy) / k.fy;
  return cam.basis.u * xc - cam.basis.v * yc - cam.basis.w;
}

Ray pinhole_ray(const CameraModel& cam, double px, double py) {
  Ray ray;
  ray.origin = cam.origin;
  ray.direction = normalize(pixel_direction(cam, px, py));
  return ray;
}

Ray thin_lens_ray(const CameraModel& cam, double px, double py, Rng& rng) {
  if (cam.aperture <= 0.0) return pinhole_ray(cam, px, py);
  const Vec3 focus_point = cam.origin + pixel_direction(cam, px, py) * cam.focus_distance;
  double dx, dy;
  sample_disk(rng, dx, dy);
  const Vec3 lens_point =
      cam.origin + cam.basis.u * (dx * cam.aperture) + cam.basis.v * (dy * cam.aperture);
  Ray ray;
  ray.origin = lens_point;
  ray.direction = normalize(focus_point - lens_point);
  return ray;
}

Ray camera_ray(const CameraModel& cam, double px, double py, Rng& rng) {
  return cam.kind == CameraKind::thin_lens ? thin_lens_ray(cam, px, py, rng)
                                           : pinhole_ray(cam, px, py);
}

double thin_lens_image_distance(double focal_length, double focus_distance) {
  if (!(focus_distance > focal_length) || focal_length <= 0.0)
    throw std::invalid_argument("thin_lens_image_distance: requires d_f > f > 0");
  return focal_length * focus_distance / (focus_distance - focal_length);
}

void project_point(const CameraModel& cam, const Vec3& p, double& px, double& py) {
  const Rotation3 r = cam.world_to_camera();
  const Homography h = homography_from_rt(r, r * (-cam.origin), cam.intrinsics());
  project(h, p, px, py);
}

}  // namespace vistrace
