#include "vistrace/shading.hpp"

#include "vistrace/scene.hpp"

namespace vistrace {

Vec3 reflect_dir(const Vec3& v, const Vec3& n) {
  return v - n * (2.0 * dot(v, n));
}

std::optional<Vec3> refract_dir(const Vec3& v, const Vec3& n, double n_from, double n_to) {
  const double cos_theta = -dot(v, n);
  const double sin2_theta = std::fmax(0.0, 1.0 - cos_theta * cos_theta);
  const double sin_theta = std::sqrt(sin2_theta);
  if (sin_theta < 1e-15) return -n;  // normal incidence passes straight through

  const Vec3 b = (v + n * cos_theta) / sin_theta;
  const double sin_phi = (n_from / n_to) * sin_theta;
  if (sin_phi > 1.0) return std::nullopt;  // total internal reflection
  const double cos_phi = std::sqrt(1.0 - sin_phi * sin_phi);
  return b * sin_phi - n * cos_phi;
}

double schlick_reflectance(double cos_theta, double n_t) {
  const double r0_root = (n_t - 1.0) / (n_t + 1.0);
  const double r0 = r0_root * r0_root;
  const double k = 1.0 - cos_theta;
  return r0 + (1.0 - r0) * k * k * k * k * k;
}

void light_towards(const LightSource& light, const Vec3& point, Vec3& l, double& distance) {
  if (light.kind == LightKind::point) {
    const Vec3 d = light.position - point;
    distance = norm(d);
    l = d / distance;
  } else {
    l = -light.direction;
    distance = std::numeric_limits<double>::infinity();
  }
}

Rgb light_irradiance(const LightSource& light, const Vec3& point) {
  if (light.kind == LightKind::point) {
    const double r2 = norm2(light.position - point);
    return light.intensity / std::fmax(r2, 1e-12);
  }
  return light.intensity;
}

Rgb phong_radiance(const Vec3& point, const Vec3& normal, const Vec3& view,
                   const LightSource& light, const Material& material,
                   double ambient, double emissive_scale) {
  Vec3 l;
  double dist;
  light_towards(light, point, l, dist);
  const Rgb incident = light_irradiance(light, point);

  Rgb result = material.ke * emissive_scale + material.ka * ambient;
  const double cos_diffuse = std::fmax(0.0, dot(l, normal));
  result += material.kd * incident * cos_diffuse;
  if (material.shininess > 0 || material.ks.x > 0 || material.ks.y > 0 || material.ks.z > 0) {
    // R is the light direction mirrored about the normal (incoming -l)
    const Vec3 r = reflect_dir(-l, normal);
    const double cos_spec = std::fmax(0.0, dot(r, view));
    result += material.ks * incident * std::pow(cos_spec, material.shininess);
  }
  return result;
}

bool shadow_test(const Scene& scene, const Vec3& point, const LightSource& light) {
  Vec3 l;
  double dist;
  light_towards(light, point, l, dist);
  Ray ray;
  ray.origin = point;
  ray.direction = l;
  ray.t_min = scene.self_intersect_bias();
  ray.t_max = dist;  // occluders beyond a point light do not count
  return scene.any_hit(ray);
}

}  // namespace vistrace
