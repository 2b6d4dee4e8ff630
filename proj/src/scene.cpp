#include "vistrace/scene.hpp"

namespace vistrace {

void Scene::add_sphere(const Sphere& s, int material, int texture) {
  PrimitiveRef ref;
  ref.kind = PrimitiveRef::Kind::sphere;
  ref.sphere = s;
  primitives.push_back({ref, material, texture});
}

void Scene::add_triangle(const Triangle& t, int material, int texture) {
  PrimitiveRef ref;
  ref.kind = PrimitiveRef::Kind::triangle;
  ref.triangle = t;
  primitives.push_back({ref, material, texture});
}

void Scene::finalize() {
  shapes_.clear();
  shapes_.reserve(primitives.size());
  for (const ScenePrimitive& p : primitives) shapes_.push_back(p.shape);

  Aabb world;
  for (const PrimitiveRef& s : shapes_) world.grow(s.bounds());
  if (!shapes_.empty()) {
    const Vec3 extent = world.max - world.min;
    scale_ = std::fmax(1e-6, std::fmax(extent.x, std::fmax(extent.y, extent.z)));
    bvh_ = std::make_unique<BvhTree>(BvhTree::build(shapes_));
  } else {
    scale_ = 1.0;
    bvh_.reset();
  }
}

std::optional<HitRecord> Scene::first_hit(const Ray& ray) const {
  if (!bvh_) return shapes_.empty() ? std::nullopt : linear_first_hit(shapes_, ray);
  return bvh_->first_hit(shapes_, ray);
}

bool Scene::any_hit(const Ray& ray) const {
  if (!bvh_) return false;
  return bvh_->any_hit(shapes_, ray);
}

Rgb Scene::background_radiance(const Vec3& direction) const {
  if (sky) {
    const Rgb s = sky->sky_radiance(direction);
    if (s.x > 0 || s.y > 0 || s.z > 0) return s;
    return background;
  }
  return background;
}

}  // namespace vistrace
