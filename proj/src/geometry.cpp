#include "vistrace/geometry.hpp"

#include <algorithm>

namespace vistrace {

std::optional<HitRecord> ray_sphere_intersect(const Ray& ray, const Sphere& s) {
  const Vec3 oc = ray.origin - s.center;
  const double a = dot(ray.direction, ray.direction);
  const double half_b = dot(ray.direction, oc);
  const double c = dot(oc, oc) - s.radius * s.radius;
  const double disc = half_b * half_b - a * c;
  if (disc < 0.0) return std::nullopt;

  const double sq = std::sqrt(disc);
  double t = (-half_b - sq) / a;  // near root first
  if (t < ray.t_min || t > ray.t_max) {
    t = (-half_b + sq) / a;
    if (t < ray.t_min || t > ray.t_max) return std::nullopt;
  }

  HitRecord hit;
  hit.t = t;
  hit.point = ray.at(t);
  hit.normal = (hit.point - s.center) / s.radius;
  return hit;
}

std::optional<HitRecord> ray_triangle_intersect(const Ray& ray, const Triangle& tri) {
  // Solve [b-a, c-a, -d] [beta gamma t]^T = e - a by Cramer's rule via
  // cross products; a near-zero determinant means the ray is parallel to
  // the triangle plane.
  const Vec3 e1 = tri.b - tri.a;
  const Vec3 e2 = tri.c - tri.a;
  const Vec3 pvec = cross(ray.direction, e2);
  const double detm = dot(e1, pvec);
  if (std::abs(detm) < 1e-12) return std::nullopt;

  const double inv_det = 1.0 / detm;
  const Vec3 tvec = ray.origin - tri.a;
  const double beta = dot(tvec, pvec) * inv_det;
  if (beta <= 0.0 || beta >= 1.0) return std::nullopt;

  const Vec3 qvec = cross(tvec, e1);
  const double gamma = dot(ray.direction, qvec) * inv_det;
  if (gamma <= 0.0 || beta + gamma >= 1.0) return std::nullopt;

  const double t = dot(e2, qvec) * inv_det;
  if (t < ray.t_min || t > ray.t_max) return std::nullopt;

  HitRecord hit;
  hit.t = t;
  hit.point = ray.at(t);
  hit.beta = beta;
  hit.gamma = gamma;
  if (tri.has_normals) {
    hit.normal = normalize(tri.na * (1.0 - beta - gamma) + tri.nb * beta + tri.nc * gamma);
  } else {
    hit.normal = normalize(cross(e1, e2));
  }
  if (tri.has_uv) {
    const double w0 = 1.0 - beta - gamma;
    hit.u = w0 * tri.ua + beta * tri.ub + gamma * tri.uc;
    hit.v = w0 * tri.va + beta * tri.vb + gamma * tri.vc;
    hit.has_uv = true;
  }
  return hit;
}

void sphere_uv(const Vec3& p, const Sphere& s, double& u, double& v) {
  const Vec3 d = p - s.center;
  if (std::abs(norm(d) - s.radius) > 1e-6 * s.radius)
    throw std::invalid_argument("sphere_uv: point is not on the sphere surface");
  const double theta = std::acos(std::clamp(d.z / s.radius, -1.0, 1.0));
  double phi = std::atan2(d.y, d.x);
  if (phi < 0.0) phi += 2.0 * kPi;
  u = phi / (2.0 * kPi);
  v = (kPi - theta) / kPi;
}

}  // namespace vistrace
