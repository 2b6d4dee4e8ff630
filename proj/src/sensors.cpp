#include "vistrace/sensors.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "vistrace/image.hpp"
#include "vistrace/shading.hpp"

namespace vistrace {

namespace {

double probe_depth(const Scene& scene, const CameraModel& camera, int x, int y) {
  const Ray ray = pinhole_ray(camera, x + 0.5, y + 0.5);
  const auto hit = scene.first_hit(ray);
  return hit ? hit->t : std::numeric_limits<double>::infinity();
}

}  // namespace

DepthMap depth_map(const Scene& scene, const CameraModel& camera) {
  DepthMap map;
  map.width = camera.width;
  map.height = camera.height;
  map.t.resize(static_cast<size_t>(camera.width) * camera.height);
#pragma omp parallel for schedule(dynamic, 4)
  for (int y = 0; y < camera.height; ++y)
    for (int x = 0; x < camera.width; ++x)
      map.t[static_cast<size_t>(y) * camera.width + x] = probe_depth(scene, camera, x, y);
  return map;
}

DepthMap depth_map_serial(const Scene& scene, const CameraModel& camera) {
  DepthMap map;
  map.width = camera.width;
  map.height = camera.height;
  map.t.resize(static_cast<size_t>(camera.width) * camera.height);
  for (int y = 0; y < camera.height; ++y)
    for (int x = 0; x < camera.width; ++x)
      map.t[static_cast<size_t>(y) * camera.width + x] = probe_depth(scene, camera, x, y);
  return map;
}

PointCloud point_cloud(const Scene& scene, const CameraModel& camera) {
  PointCloud cloud;
  for (int y = 0; y < camera.height; ++y) {
    for (int x = 0; x < camera.width; ++x) {
      const Ray ray = pinhole_ray(camera, x + 0.5, y + 0.5);
      const auto hit = scene.first_hit(ray);
      if (!hit) continue;

      const Material& mat = scene.material_of(*hit);
      const Vec3 n = dot(ray.direction, hit->normal) < 0 ? hit->normal : -hit->normal;
      Rgb color = mat.ke + mat.ka * scene.ambient;
      for (const LightSource& light : scene.lights) {
        if (shadow_test(scene, hit->point, light)) continue;
        color += phong_radiance(hit->point, n, -ray.direction, light, mat,
                                /*ambient=*/0.0, /*emissive_scale=*/0.0);
      }
      cloud.points.push_back({hit->point, color, hit->primitive, x, y});
    }
  }
  return cloud;
}

std::vector<int> contour_map(const std::vector<double>& values, int width, int height,
                             int n_levels) {
  if (n_levels < 2) throw std::invalid_argument("contour_map: need n_levels >= 2");
  if (values.size() != static_cast<size_t>(width) * height)
    throw std::invalid_argument("contour_map: size mismatch");

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    lo = std::fmin(lo, v);
    hi = std::fmax(hi, v);
  }

  std::vector<int> bands(values.size(), -1);
  if (!(hi > lo)) {
    // constant (or empty) grid: one band
    for (size_t i = 0; i < values.size(); ++i)
      if (std::isfinite(values[i])) bands[i] = 0;
    return bands;
  }
  const double scale = n_levels / (hi - lo);
  for (size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) continue;
    const int band = static_cast<int>((values[i] - lo) * scale);
    bands[i] = std::clamp(band, 0, n_levels - 1);
  }
  return bands;
}

void write_depth_preview_pgm(const DepthMap& depth, const std::string& path) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  for (double t : depth.t) {
    if (!std::isfinite(t)) continue;
    lo = std::fmin(lo, t);
    hi = std::fmax(hi, t);
  }
  std::vector<uint8_t> gray(depth.t.size(), 0);  // misses stay black
  const double span = hi > lo ? hi - lo : 1.0;
  for (size_t i = 0; i < depth.t.size(); ++i) {
    if (!std::isfinite(depth.t[i])) continue;
    // near surfaces bright
    gray[i] = static_cast<uint8_t>(std::lround(255.0 * (1.0 - (depth.t[i] - lo) / span)));
  }
  write_pgm(gray, depth.width, depth.height, path);
}

void write_contour_pgm(const std::vector<int>& bands, int width, int height, int n_levels,
                       const std::string& path) {
  std::vector<uint8_t> gray(bands.size(), 0);
  for (size_t i = 0; i < bands.size(); ++i)
    if (bands[i] >= 0)
      gray[i] = static_cast<uint8_t>(std::lround(255.0 * (bands[i] + 1) / n_levels));
  write_pgm(gray, width, height, path);
}

void write_point_cloud_xyz(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_point_cloud_xyz: cannot open " + path);
  char buf[160];
  for (const PointCloud::Point& p : cloud.points) {
    std::snprintf(buf, sizeof buf, "%.9g %.9g %.9g %d %d %d\n", p.position.x, p.position.y,
                  p.position.z, encode_srgb_byte(p.color.x), encode_srgb_byte(p.color.y),
                  encode_srgb_byte(p.color.z));
    out << buf;
  }
}

StereoRig make_rig(const CameraModel& left, const CameraModel& right) {
  StereoRig rig;
  rig.left = left.intrinsics();
  rig.right = right.intrinsics();
  const Rotation3 rl = left.world_to_camera();
  const Rotation3 rr = right.world_to_camera();
  rig.rotation = rr * rl.transposed();
  rig.translation = rr * (left.origin - right.origin);
  return rig;
}

Vec3 triangulate(const StereoRig& rig, double ul, double vl, double ur, double vr) {
  // image-centered coordinates
  const double Ul = ul - rig.left.ox;
  const double Vl = vl - rig.left.oy;
  const double Ur = ur - rig.right.ox;
  const Rotation3& R = rig.rotation;
  const Vec3& t = rig.translation;
  (void)vr;  // the closed form needs only the right U coordinate

  const double denom = (R.m[0][0] * rig.right.fx - R.m[2][0] * Ur) * (Ul / rig.left.fx) +
                       (R.m[0][1] * rig.right.fx - R.m[2][1] * Ur) * (Vl / rig.left.fy) +
                       (R.m[0][2] * rig.right.fx - R.m[2][2] * Ur);
  if (std::abs(denom) < 1e-12)
    throw std::domain_error("triangulate: degenerate geometry (no baseline or point at infinity)");

  const double zl = (t.z * Ur - rig.right.fx * t.x) / denom;
  return {zl * Ul / rig.left.fx, zl * Vl / rig.left.fy, zl};
}

Vec3 relative_error_pct(const Vec3& estimate, const Vec3& truth) {
  auto component = [](double est, double tru) {
    if (std::abs(tru) < 1e-300) return std::numeric_limits<double>::quiet_NaN();
    return std::abs(est - tru) / std::abs(tru) * 100.0;
  };
  return {component(estimate.x, truth.x), component(estimate.y, truth.y),
          component(estimate.z, truth.z)};
}

}  // namespace vistrace
