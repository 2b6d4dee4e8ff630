#include "vistrace/accel.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace vistrace {

void Aabb::grow(const Vec3& p) {
  min = {std::fmin(min.x, p.x), std::fmin(min.y, p.y), std::fmin(min.z, p.z)};
  max = {std::fmax(max.x, p.x), std::fmax(max.y, p.y), std::fmax(max.z, p.z)};
}

void Aabb::grow(const Aabb& b) {
  grow(b.min);
  grow(b.max);
}

bool Aabb::contains(const Aabb& b, double eps) const {
  return b.min.x >= min.x - eps && b.min.y >= min.y - eps && b.min.z >= min.z - eps &&
         b.max.x <= max.x + eps && b.max.y <= max.y + eps && b.max.z <= max.z + eps;
}

bool Aabb::hit(const Ray& ray, const Vec3& inv_dir, double t_max) const {
  double t0 = ray.t_min, t1 = t_max;
  for (int axis = 0; axis < 3; ++axis) {
    const double inv = inv_dir[axis];
    double near = (min[axis] - ray.origin[axis]) * inv;
    double far = (max[axis] - ray.origin[axis]) * inv;
    if (inv < 0.0) std::swap(near, far);
    t0 = near > t0 ? near : t0;
    t1 = far < t1 ? far : t1;
    if (t0 > t1) return false;
  }
  return true;
}

Aabb PrimitiveRef::bounds() const {
  Aabb box;
  if (kind == Kind::sphere) {
    const Vec3 r{sphere.radius, sphere.radius, sphere.radius};
    box.grow(sphere.center - r);
    box.grow(sphere.center + r);
  } else {
    box.grow(triangle.a);
    box.grow(triangle.b);
    box.grow(triangle.c);
  }
  return box;
}

std::optional<HitRecord> PrimitiveRef::intersect(const Ray& ray) const {
  return kind == Kind::sphere ? ray_sphere_intersect(ray, sphere)
                              : ray_triangle_intersect(ray, triangle);
}

namespace {

struct BuildEntry {
  int node;
  int first, count;
};

}  // namespace

BvhTree BvhTree::build(const std::vector<PrimitiveRef>& primitives) {
  if (primitives.empty()) throw std::invalid_argument("BvhTree::build: no primitives");

  const int n = static_cast<int>(primitives.size());
  std::vector<Aabb> boxes(n);
  std::vector<Vec3> centroids(n);
  for (int i = 0; i < n; ++i) {
    boxes[i] = primitives[i].bounds();
    centroids[i] = boxes[i].centroid();
  }

  BvhTree tree;
  tree.order_.resize(n);
  for (int i = 0; i < n; ++i) tree.order_[i] = i;
  tree.nodes_.reserve(2 * static_cast<size_t>(n));

  constexpr int kLeafSize = 4;
  std::vector<BuildEntry> stack;
  tree.nodes_.emplace_back();
  stack.push_back({0, 0, n});

  while (!stack.empty()) {
    const BuildEntry entry = stack.back();
    stack.pop_back();

    Aabb box;
    Aabb centroid_box;
    for (int i = entry.first; i < entry.first + entry.count; ++i) {
      box.grow(boxes[tree.order_[i]]);
      centroid_box.grow(centroids[tree.order_[i]]);
    }
    BvhNode& node = tree.nodes_[entry.node];
    node.box = box;

    const Vec3 extent = centroid_box.max - centroid_box.min;
    const bool splittable = extent.x > 0 || extent.y > 0 || extent.z > 0;
    if (entry.count <= kLeafSize || !splittable) {
      node.right_or_first = entry.first;
      node.count = static_cast<uint16_t>(entry.count);
      continue;
    }

    int axis = 0;
    if (extent.y > extent[axis]) axis = 1;
    if (extent.z > extent[axis]) axis = 2;

    // median of centroids; id as tiebreak keeps the order deterministic
    const int mid = entry.first + entry.count / 2;
    auto begin = tree.order_.begin();
    std::nth_element(begin + entry.first, begin + mid, begin + entry.first + entry.count,
                     [&](int a, int b) {
                       const double ca = centroids[a][axis], cb = centroids[b][axis];
                       return ca < cb || (ca == cb && a < b);
                     });

    const int left = static_cast<int>(tree.nodes_.size());
    tree.nodes_.emplace_back();
    tree.nodes_.emplace_back();
    tree.nodes_[entry.node].right_or_first = left + 1;
    tree.nodes_[entry.node].count = 0;
    stack.push_back({left + 1, mid, entry.first + entry.count - mid});
    stack.push_back({left, entry.first, mid - entry.first});
  }
  return tree;
}

std::optional<HitRecord> BvhTree::first_hit(const std::vector<PrimitiveRef>& primitives,
                                            const Ray& ray, long* tested) const {
  const Vec3 inv_dir{1.0 / ray.direction.x, 1.0 / ray.direction.y, 1.0 / ray.direction.z};
  std::optional<HitRecord> best;
  double closest = ray.t_max;
  int best_id = std::numeric_limits<int>::max();

  int stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const BvhNode& node = nodes_[stack[--top]];
    if (!node.box.hit(ray, inv_dir, closest)) continue;
    if (node.is_leaf()) {
      for (int i = node.right_or_first; i < node.right_or_first + node.count; ++i) {
        const int id = order_[i];
        if (tested) ++*tested;
        Ray clipped = ray;
        clipped.t_max = closest;
        auto hit = primitives[id].intersect(clipped);
        if (!hit) continue;
        if (hit->t < closest || (hit->t == closest && id < best_id)) {
          closest = hit->t;
          best_id = id;
          hit->primitive = id;
          best = *hit;
        }
      }
    } else {
      const int left = node.right_or_first - 1;
      stack[top++] = node.right_or_first;
      stack[top++] = left;
    }
  }
  return best;
}

bool BvhTree::any_hit(const std::vector<PrimitiveRef>& primitives, const Ray& ray) const {
  const Vec3 inv_dir{1.0 / ray.direction.x, 1.0 / ray.direction.y, 1.0 / ray.direction.z};
  int stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const BvhNode& node = nodes_[stack[--top]];
    if (!node.box.hit(ray, inv_dir, ray.t_max)) continue;
    if (node.is_leaf()) {
      for (int i = node.right_or_first; i < node.right_or_first + node.count; ++i)
        if (primitives[order_[i]].intersect(ray)) return true;
    } else {
      stack[top++] = node.right_or_first;
      stack[top++] = node.right_or_first - 1;
    }
  }
  return false;
}

int BvhTree::depth() const {
  // nodes are laid out parent-before-children; walk with explicit depths
  std::vector<std::pair<int, int>> stack{{0, 1}};
  int deepest = 0;
  while (!stack.empty()) {
    auto [idx, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    const BvhNode& node = nodes_[idx];
    if (!node.is_leaf()) {
      stack.push_back({node.right_or_first, d + 1});
      stack.push_back({node.right_or_first - 1, d + 1});
    }
  }
  return deepest;
}

std::optional<HitRecord> linear_first_hit(const std::vector<PrimitiveRef>& primitives,
                                          const Ray& ray) {
  std::optional<HitRecord> best;
  Ray query = ray;
  for (size_t i = 0; i < primitives.size(); ++i) {
    auto hit = primitives[i].intersect(query);
    if (hit && (!best || hit->t < best->t)) {
      hit->primitive = static_cast<int>(i);
      best = *hit;
      query.t_max = hit->t;  // lower ids win exact ties via strict <
    }
  }
  return best;
}

}  // namespace vistrace
