#pragma once

// Sensor products derived from first-hit tracing: depth maps (Euclidean
// range along the primary ray), LiDAR-style point clouds, contour maps,
// and closed-form stereo triangulation with its relative-error metric.

#include <optional>
#include <string>
#include <vector>

#include "vistrace/camera.hpp"
#include "vistrace/scene.hpp"

namespace vistrace {

struct DepthMap {
  int width = 0, height = 0;
  std::vector<double> t;  // +inf where the primary ray misses

  double at(int x, int y) const { return t[static_cast<size_t>(y) * width + x]; }
};

struct PointCloud {
  struct Point {
    Vec3 position;
    Rgb color;
    int primitive = -1;
    int pixel_x = 0, pixel_y = 0;
  };
  std::vector<Point> points;
};

DepthMap depth_map(const Scene& scene, const CameraModel& camera);
DepthMap depth_map_serial(const Scene& scene, const CameraModel& camera);

// Hit points with deterministic local (Phong) shading.
PointCloud point_cloud(const Scene& scene, const CameraModel& camera);

// Uniform iso-level bands between the finite min and max; -1 marks misses.
// A constant grid collapses to a single band.
std::vector<int> contour_map(const std::vector<double>& values, int width, int height,
                             int n_levels);

void write_depth_preview_pgm(const DepthMap& depth, const std::string& path);
void write_contour_pgm(const std::vector<int>& bands, int width, int height, int n_levels,
                       const std::string& path);
// ASCII lines "x y z r g b" with 8-bit color.
void write_point_cloud_xyz(const PointCloud& cloud, const std::string& path);

// Left/right intrinsics plus the transform taking left-frame coordinates
// to the right frame: x_r = R x_l + t.
struct StereoRig {
  CameraIntrinsics left, right;
  Rotation3 rotation;
  Vec3 translation;
};

StereoRig make_rig(const CameraModel& left, const CameraModel& right);

// Closed-form triangulation from a corresponding pixel pair; returns the
// point in the left camera frame. Throws std::domain_error when the depth
// denominator degenerates (zero baseline / point at infinity).
Vec3 triangulate(const StereoRig& rig, double ul, double vl, double ur, double vr);

// Componentwise |estimate - truth| / |truth| * 100; NaN flags components
// whose truth is (near) zero.
Vec3 relative_error_pct(const Vec3& estimate, const Vec3& truth);

}  // namespace vistrace
