#include "vistrace/render.hpp"

#include "vistrace/shading.hpp"

namespace vistrace {

namespace {

Rgb surface_albedo(const Scene& scene, const HitRecord& hit, const Material& mat) {
  Rgb albedo = mat.albedo;
  const int tex = scene.primitives[hit.primitive].texture;
  if (tex >= 0) {
    double u = hit.u, v = hit.v;
    if (!hit.has_uv) {
      const PrimitiveRef& shape = scene.primitives[hit.primitive].shape;
      if (shape.kind == PrimitiveRef::Kind::sphere)
        sphere_uv(hit.point, shape.sphere, u, v);
    }
    albedo *= texture_lookup(scene.textures[tex], u, v);
  }
  return albedo;
}

// Next-event estimation against explicit light sources. Emissive surfaces
// are reached by path hits instead, so nothing is counted twice.
Rgb direct_lighting(const Scene& scene, const HitRecord& hit, const Vec3& shading_normal,
                    const Vec3& view, const Rgb& albedo, const Material& mat) {
  Rgb sum{0, 0, 0};
  for (const LightSource& light : scene.lights) {
    Vec3 l;
    double dist;
    light_towards(light, hit.point, l, dist);
    const double cos_i = dot(l, shading_normal);
    if (cos_i <= 0.0) continue;
    if (shadow_test(scene, hit.point, light)) continue;

    const Rgb irradiance = light_irradiance(light, hit.point);
    Rgb brdf = albedo * (1.0 / kPi);
    if (mat.shininess > 0 && (mat.ks.x > 0 || mat.ks.y > 0 || mat.ks.z > 0)) {
      const Vec3 r = reflect_dir(-l, shading_normal);
      const double cos_s = std::fmax(0.0, dot(r, view));
      brdf += mat.ks * ((mat.shininess + 2.0) / (2.0 * kPi) *
                        std::pow(cos_s, mat.shininess));
    }
    sum += brdf * irradiance * cos_i;
  }
  return sum;
}

}  // namespace

Rgb trace_path(const Scene& scene, const Ray& primary, int depth, int max_depth, Rng& rng,
               RenderStats* stats) {
  Rgb radiance{0, 0, 0};
  Rgb throughput{1, 1, 1};
  Ray ray = primary;

  for (int bounce = depth; bounce <= max_depth; ++bounce) {
    const auto hit = scene.first_hit(ray);
    if (!hit) {
      radiance += throughput * scene.background_radiance(ray.direction);
      break;
    }

    const Material& mat = scene.material_of(*hit);
    const Vec3 outward = hit->normal;
    const bool entering = dot(ray.direction, outward) < 0.0;
    const Vec3 n = entering ? outward : -outward;  // against the incoming ray
    const Vec3 view = -ray.direction;

    radiance += throughput * mat.ke;

    if (bounce == max_depth) break;

    const Rgb albedo = surface_albedo(scene, *hit, mat);

    if (mat.dielectric) {
      const double n_from = entering ? 1.0 : mat.ior;
      const double n_to = entering ? mat.ior : 1.0;
      const double cos_theta = std::fmin(1.0, -dot(ray.direction, n));
      const auto refracted = refract_dir(ray.direction, n, n_from, n_to);
      const double reflect_prob =
          refracted ? schlick_reflectance(cos_theta, mat.ior) : 1.0;
      ray.origin = hit->point;
      ray.direction = (rng.uniform() < reflect_prob) ? reflect_dir(ray.direction, n)
                                                     : *refracted;
      ray.t_min = scene.self_intersect_bias();
      ray.t_max = std::numeric_limits<double>::infinity();
      continue;
    }

    if (mat.specular && !mat.diffuse) {
      const Rgb tint = (mat.ks.x > 0 || mat.ks.y > 0 || mat.ks.z > 0) ? mat.ks : albedo;
      throughput *= tint;
      ray.origin = hit->point;
      ray.direction = reflect_dir(ray.direction, n);
      ray.t_min = scene.self_intersect_bias();
      ray.t_max = std::numeric_limits<double>::infinity();
      continue;
    }

    // diffuse (optionally with a glossy Phong lobe)
    radiance += throughput * direct_lighting(scene, *hit, n, view, albedo, mat);

    const double diffuse_weight = luminance(albedo);
    const double gloss_weight = mat.shininess > 0 ? luminance(mat.ks) : 0.0;
    const double total = diffuse_weight + gloss_weight;
    if (total <= 0.0) break;

    if (rng.uniform() * total < diffuse_weight) {
      // cosine sample: f cos / (pdf P(diffuse)) = albedo * total / diffuse_weight
      ray.direction = sample_cosine_hemisphere(n, rng);
      throughput *= albedo * (total / diffuse_weight);
    } else {
      // power-cosine lobe about the mirror direction; f = ks (n+2)/(2 pi) cos^n
      const Vec3 mirror = reflect_dir(ray.direction, n);
      const Vec3 dir = sample_phong_lobe(mirror, mat.shininess, rng);
      const double cos_i = dot(dir, n);
      if (cos_i <= 0.0) break;  // lobe sample dipped below the surface
      ray.direction = dir;
      throughput *= mat.ks * ((mat.shininess + 2.0) / (mat.shininess + 1.0) * cos_i *
                              (total / gloss_weight));
    }
    ray.origin = hit->point;
    ray.t_min = scene.self_intersect_bias();
    ray.t_max = std::numeric_limits<double>::infinity();
  }

  if (!is_finite(radiance) || radiance.x < 0 || radiance.y < 0 || radiance.z < 0) {
    if (stats) stats->nonfinite_clamped.fetch_add(1, std::memory_order_relaxed);
    return {0, 0, 0};
  }
  return radiance;
}

namespace {

void render_pixel(const Scene& scene, const CameraModel& camera,
                  const SamplerConfig& sampler, int x, int y, RadianceImage& image,
                  RenderStats* stats) {
  const uint64_t pixel_index = static_cast<uint64_t>(y) * camera.width + x;
  Rgb sum{0, 0, 0};
  for (int s = 0; s < sampler.spp; ++s) {
    Rng rng(sampler.seed, pixel_index, static_cast<uint64_t>(s));
    const double jx = sampler.spp > 1 ? rng.uniform() : 0.5;
    const double jy = sampler.spp > 1 ? rng.uniform() : 0.5;
    const Ray ray = camera_ray(camera, x + jx, y + jy, rng);

    if (s == 0) {
      // first-hit records come from the pixel-center primary ray
      const Ray center = pinhole_ray(camera, x + 0.5, y + 0.5);
      if (auto hit = scene.first_hit(center)) {
        image.depth[pixel_index] = hit->t;
        image.hit_points[pixel_index] = hit->point;
        image.hit_primitive[pixel_index] = hit->primitive;
      }
    }
    sum += trace_path(scene, ray, 0, sampler.max_depth, rng, stats);
  }
  image.pixels[pixel_index] = sum / static_cast<double>(sampler.spp);
}

}  // namespace

RadianceImage render_serial(const Scene& scene, const CameraModel& camera,
                            const SamplerConfig& sampler, RenderStats* stats) {
  RadianceImage image(camera.width, camera.height);
  for (int y = 0; y < camera.height; ++y)
    for (int x = 0; x < camera.width; ++x)
      render_pixel(scene, camera, sampler, x, y, image, stats);
  return image;
}

RadianceImage render_parallel(const Scene& scene, const CameraModel& camera,
                              const SamplerConfig& sampler, RenderStats* stats) {
  RadianceImage image(camera.width, camera.height);
#pragma omp parallel for schedule(dynamic, 1)
  for (int y = 0; y < camera.height; ++y)
    for (int x = 0; x < camera.width; ++x)
      render_pixel(scene, camera, sampler, x, y, image, stats);
  return image;
}

}  // namespace vistrace
