#pragma once

// Everything a ray can hit, plus lights and background. Immutable once
// finalized; intersection queries are read-only and freely concurrent.

#include <memory>
#include <optional>
#include <vector>

#include "vistrace/accel.hpp"
#include "vistrace/atmosphere.hpp"
#include "vistrace/material.hpp"

namespace vistrace {

struct ScenePrimitive {
  PrimitiveRef shape;
  int material = 0;
  int texture = -1;  // index into textures, -1 when untextured
};

struct Scene {
  std::vector<ScenePrimitive> primitives;
  std::vector<Material> materials;
  std::vector<Texture> textures;
  std::vector<LightSource> lights;
  Rgb background{0, 0, 0};
  double ambient = 0.0;  // Phong I_A, scene-global
  std::shared_ptr<const AtmosphereModel> sky;  // background radiance when set

  // geometry epsilon: secondary rays start at 1e-4 of the scene scale
  double self_intersect_bias() const { return 1e-4 * scale_; }

  void add_sphere(const Sphere& s, int material, int texture = -1);
  void add_triangle(const Triangle& t, int material, int texture = -1);

  // Builds the BVH and freezes the scene scale. Call after adding geometry.
  void finalize();

  std::optional<HitRecord> first_hit(const Ray& ray) const;
  bool any_hit(const Ray& ray) const;

  Rgb background_radiance(const Vec3& direction) const;

  const Material& material_of(const HitRecord& hit) const {
    return materials[primitives[hit.primitive].material];
  }

  bool finalized() const { return bvh_ != nullptr; }

 private:
  std::vector<PrimitiveRef> shapes_;  // mirrors primitives[i].shape for the BVH
  std::unique_ptr<BvhTree> bvh_;
  double scale_ = 1.0;
};

}  // namespace vistrace
