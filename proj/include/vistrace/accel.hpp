#pragma once

// Bounding volume hierarchy over the scene's primitive soup. Built by
// median split on the longest axis of the centroid bounds, leaves hold up
// to 4 primitives. Nodes live in a flat array and traversal is iterative.

#include <cstdint>
#include <optional>
#include <vector>

#include "vistrace/geometry.hpp"

namespace vistrace {

struct Aabb {
  Vec3 min{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
           std::numeric_limits<double>::infinity()};
  Vec3 max{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity()};

  void grow(const Vec3& p);
  void grow(const Aabb& b);
  Vec3 centroid() const { return (min + max) * 0.5; }
  bool contains(const Aabb& b, double eps = 1e-12) const;
  // slab test against [t_min, t_max]
  bool hit(const Ray& ray, const Vec3& inv_dir, double t_max) const;
};

struct BvhNode {
  Aabb box;
  // interior: left child is node index + 1, right child stored here;
  // leaf: first primitive and count
  int32_t right_or_first = -1;
  uint16_t count = 0;  // 0 marks an interior node
  bool is_leaf() const { return count > 0; }
};

// The geometry the tree indexes: a view the caller keeps alive.
struct PrimitiveRef {
  enum class Kind : uint8_t { sphere, triangle };
  Kind kind = Kind::sphere;
  Sphere sphere;
  Triangle triangle;

  Aabb bounds() const;
  std::optional<HitRecord> intersect(const Ray& ray) const;
};

class BvhTree {
 public:
  // Throws std::invalid_argument on an empty primitive list.
  static BvhTree build(const std::vector<PrimitiveRef>& primitives);

  // First hit along the ray; identical result (primitive id and t) to a
  // linear scan, equal-t ties broken toward the smaller primitive id.
  // `tested` counts primitive intersection tests when non-null.
  std::optional<HitRecord> first_hit(const std::vector<PrimitiveRef>& primitives,
                                     const Ray& ray, long* tested = nullptr) const;

  // true iff anything intersects the ray within its [t_min, t_max]
  bool any_hit(const std::vector<PrimitiveRef>& primitives, const Ray& ray) const;

  const std::vector<BvhNode>& nodes() const { return nodes_; }
  const std::vector<int>& primitive_order() const { return order_; }
  int depth() const;

 private:
  std::vector<BvhNode> nodes_;
  std::vector<int> order_;  // leaf ranges index into this permutation
};

// Reference implementation used by tests and as a fallback for tiny scenes.
std::optional<HitRecord> linear_first_hit(const std::vector<PrimitiveRef>& primitives,
                                          const Ray& ray);

}  // namespace vistrace
