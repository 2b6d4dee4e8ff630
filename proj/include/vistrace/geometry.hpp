#pragma once

// Primitive shapes and ray intersection. Spheres solve the quadratic in
// closed form; triangles solve the 3x3 barycentric system (Moller-Trumbore).

#include <optional>

#include "vistrace/math.hpp"

namespace vistrace {

struct Sphere {
  Vec3 center;
  double radius = 1.0;
};

struct Triangle {
  Vec3 a, b, c;
  // optional per-vertex shading attributes
  Vec3 na, nb, nc;
  double ua = 0, va = 0, ub = 0, vb = 0, uc = 0, vc = 0;
  bool has_normals = false;
  bool has_uv = false;

  Vec3 geometric_normal() const { return normalize(cross(b - a, c - a)); }
};

struct HitRecord {
  double t = 0;
  Vec3 point;
  Vec3 normal;  // unit, outward (sphere center-out / triangle winding)
  int primitive = -1;
  double beta = 0, gamma = 0;  // barycentric, triangles only
  double u = 0, v = 0;         // texture coordinates when available
  bool has_uv = false;
};

std::optional<HitRecord> ray_sphere_intersect(const Ray& ray, const Sphere& s);
std::optional<HitRecord> ray_triangle_intersect(const Ray& ray, const Triangle& tri);

// Spherical parameterization: theta = acos((z - zc)/R) from the north pole,
// phi = atan2(y - yc, x - xc) wrapped to [0, 2 pi); u = phi / 2 pi,
// v = (pi - theta) / pi. Throws if p is off-surface by more than 1e-6 R.
void sphere_uv(const Vec3& p, const Sphere& s, double& u, double& v);

}  // namespace vistrace
