#include <sstream>

#include "doctest.h"
#include "vistrace/geometry.hpp"
#include "vistrace/mesh.hpp"
#include "vistrace/sampler.hpp"

using namespace vistrace;

namespace {

Ray make_ray(const Vec3& origin, const Vec3& dir, double t_min = 0.0) {
  Ray r;
  r.origin = origin;
  r.direction = normalize(dir);
  r.t_min = t_min;
  return r;
}

}  // namespace

TEST_CASE("ray_sphere_intersect: axis-aligned hit") {
  const auto hit = ray_sphere_intersect(make_ray({0, 0, 0}, {0, 0, 1}), {{0, 0, 5}, 1});
  REQUIRE(hit);
  CHECK(hit->t == doctest::Approx(4.0));
  CHECK(norm(hit->normal - Vec3{0, 0, -1}) < 1e-12);
}

TEST_CASE("ray_sphere_intersect: grazing ray touches at one point") {
  const auto hit = ray_sphere_intersect(make_ray({0, 0, 0}, {0, 0, 1}), {{1, 0, 5}, 1});
  REQUIRE(hit);
  CHECK(hit->t == doctest::Approx(5.0));
}

TEST_CASE("ray_sphere_intersect: miss") {
  CHECK_FALSE(ray_sphere_intersect(make_ray({0, 0, 0}, {0, 0, 1}), {{3, 0, 5}, 1}));
}

TEST_CASE("ray_sphere_intersect: inside hits far wall, respects t bounds") {
  const auto hit = ray_sphere_intersect(make_ray({0, 0, 5}, {0, 0, 1}), {{0, 0, 5}, 1});
  REQUIRE(hit);
  CHECK(hit->t == doctest::Approx(1.0));

  Ray limited = make_ray({0, 0, 0}, {0, 0, 1});
  limited.t_max = 3.0;  // sphere begins at t = 4
  CHECK_FALSE(ray_sphere_intersect(limited, {{0, 0, 5}, 1}));
}

TEST_CASE("ray_triangle_intersect: barycentric hit") {
  Triangle tri{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  const auto hit = ray_triangle_intersect(make_ray({0.25, 0.25, 1}, {0, 0, -1}), tri);
  REQUIRE(hit);
  CHECK(hit->t == doctest::Approx(1.0));
  CHECK(hit->beta == doctest::Approx(0.25));
  CHECK(hit->gamma == doctest::Approx(0.25));
}

TEST_CASE("ray_triangle_intersect: outside barycentric bounds") {
  Triangle tri{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  CHECK_FALSE(ray_triangle_intersect(make_ray({0.7, 0.7, 1}, {0, 0, -1}), tri));
}

TEST_CASE("ray_triangle_intersect: in-plane ray misses via singular system") {
  Triangle tri{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  CHECK_FALSE(ray_triangle_intersect(make_ray({-1, 0.2, 0}, {1, 0, 0}), tri));
}

TEST_CASE("hit geometry invariants over random spheres and triangles") {
  Rng rng(99);
  int sphere_hits = 0, triangle_hits = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    const Vec3 origin{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
    const Sphere s{{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)},
                   rng.uniform(0.1, 2.0)};
    // aim near the sphere so a healthy fraction of trials hit something
    Vec3 dir = s.center + Vec3{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)} -
               origin;
    if (norm(dir) < 1e-3) continue;
    const Ray ray = make_ray(origin, dir);
    if (auto hit = ray_sphere_intersect(ray, s)) {
      ++sphere_hits;
      CHECK(norm(hit->point - ray.at(hit->t)) < 1e-9);
      CHECK(std::abs(norm(hit->point - s.center) - s.radius) <
            1e-9 * std::fmax(1.0, s.radius));
      CHECK(std::abs(norm(hit->normal) - 1.0) < 1e-9);
    }

    Triangle tri{{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)},
                 {rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)},
                 {rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)}};
    if (norm(cross(tri.b - tri.a, tri.c - tri.a)) < 1e-6) continue;
    if (auto hit = ray_triangle_intersect(ray, tri)) {
      ++triangle_hits;
      CHECK(norm(hit->point - ray.at(hit->t)) < 1e-9);
      const Vec3 reconstructed =
          tri.a + (tri.b - tri.a) * hit->beta + (tri.c - tri.a) * hit->gamma;
      CHECK(norm(reconstructed - hit->point) < 1e-9);
    }
  }
  // make sure the property loops actually exercised hits
  CHECK(sphere_hits > 100);
  CHECK(triangle_hits > 30);
}

TEST_CASE("sphere_uv: poles and equator") {
  const Sphere s{{1, 2, 3}, 2.0};
  double u, v;
  sphere_uv(s.center + Vec3{0, 0, 2}, s, u, v);
  CHECK(v == doctest::Approx(1.0));
  sphere_uv(s.center + Vec3{2, 0, 0}, s, u, v);
  CHECK(u == doctest::Approx(0.0));
  CHECK(v == doctest::Approx(0.5));
  sphere_uv(s.center + Vec3{-2, 0, 0}, s, u, v);
  CHECK(u == doctest::Approx(0.5));
  CHECK_THROWS_AS(sphere_uv(s.center + Vec3{3, 0, 0}, s, u, v), std::invalid_argument);
}

TEST_CASE("load_obj: minimal file") {
  std::istringstream in("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
  const TriangleMesh mesh = load_obj(in, "minimal.obj");
  CHECK(mesh.vertices.size() == 3);
  CHECK(mesh.faces.size() == 1);
  CHECK(mesh.faces[0].corners[0].vertex == 0);
  CHECK(mesh.faces[0].corners[2].vertex == 2);
}

TEST_CASE("load_obj: per-corner uv and normal indices") {
  std::istringstream in(
      "v 0 0 0\nv 1 0 0\nv 0 1 0\n"
      "vt 0 0\nvt 1 0\nvt 0 1\n"
      "vn 0 0 1\nvn 0 0 1\nvn 0 0 1\n"
      "f 1/1/1 2/2/2 3/3/3\n");
  const TriangleMesh mesh = load_obj(in, "corner.obj");
  REQUIRE(mesh.faces.size() == 1);
  for (int c = 0; c < 3; ++c) {
    CHECK(mesh.faces[0].corners[c].vertex == c);
    CHECK(mesh.faces[0].corners[c].uv == c);
    CHECK(mesh.faces[0].corners[c].normal == c);
  }
}

TEST_CASE("load_obj: v//vn corners and quad fan triangulation") {
  std::istringstream in(
      "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\n"
      "vn 0 0 1\n"
      "f 1//1 2//1 3//1 4//1\n");
  const TriangleMesh mesh = load_obj(in, "quad.obj");
  CHECK(mesh.faces.size() == 2);  // quad fans into two triangles
  CHECK(mesh.faces[0].corners[0].normal == 0);
  CHECK(mesh.faces[1].corners[0].vertex == 0);
  CHECK(mesh.faces[1].corners[1].vertex == 2);
  CHECK(mesh.faces[1].corners[2].vertex == 3);
}

TEST_CASE("load_obj: out-of-range index reports the line") {
  std::istringstream in("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n");
  try {
    load_obj(in, "broken.obj");
    FAIL("expected a ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("broken.obj:4") != std::string::npos);
  }
}

TEST_CASE("load_obj: malformed face line fails") {
  std::istringstream in("v 0 0 0\nf 1 two 3\n");
  CHECK_THROWS_AS(load_obj(in, "bad.obj"), ParseError);
}

TEST_CASE("load_obj: missing referenced MTL") {
  std::istringstream in("mtllib nope.mtl\nv 0 0 0\n");
  auto lookup = [](const std::string&) -> std::unique_ptr<std::istream> { return nullptr; };
  CHECK_THROWS_AS(load_obj(in, "tex.obj", lookup), ParseError);
}

TEST_CASE("load_obj: mtllib/usemtl bind Phong coefficients") {
  const std::string mtl =
      "newmtl shiny\nKa 0.1 0.1 0.1\nKd 0.2 0.4 0.6\nKs 0.9 0.9 0.9\nKe 0 0 0\n"
      "Ns 32\nNi 1.7\nillum 3\n";
  std::istringstream in(
      "mtllib demo.mtl\nv 0 0 0\nv 1 0 0\nv 0 1 0\nusemtl shiny\nf 1 2 3\n");
  auto lookup = [&](const std::string&) -> std::unique_ptr<std::istream> {
    return std::make_unique<std::istringstream>(mtl);
  };
  const TriangleMesh mesh = load_obj(in, "demo.obj", lookup);
  REQUIRE(mesh.materials.size() == 1);
  CHECK(mesh.faces[0].material == 0);
  CHECK(mesh.materials[0].kd.y == doctest::Approx(0.4));
  CHECK(mesh.materials[0].ks.x == doctest::Approx(0.9));
  CHECK(mesh.materials[0].shininess == doctest::Approx(32));
  CHECK(mesh.materials[0].ior == doctest::Approx(1.7));
  CHECK(mesh.materials[0].specular);
}

TEST_CASE("load_obj / serialize_obj round-trips counts exactly") {
  Rng rng(4);
  std::ostringstream source;
  const int nv = 40;
  for (int i = 0; i < nv; ++i)
    source << "v " << rng.uniform(-1, 1) << ' ' << rng.uniform(-1, 1) << ' '
           << rng.uniform(-1, 1) << '\n';
  for (int i = 0; i < 25; ++i) {
    int a = 1 + static_cast<int>(rng.uniform(0, nv));
    int b = 1 + static_cast<int>(rng.uniform(0, nv));
    int c = 1 + static_cast<int>(rng.uniform(0, nv));
    source << "f " << std::min(a, nv) << ' ' << std::min(b, nv) << ' ' << std::min(c, nv)
           << '\n';
  }
  std::istringstream first_in(source.str());
  const TriangleMesh first = load_obj(first_in, "gen.obj");

  std::ostringstream serialized;
  serialize_obj(first, serialized);
  std::istringstream second_in(serialized.str());
  const TriangleMesh second = load_obj(second_in, "gen2.obj");

  CHECK(second.vertices.size() == first.vertices.size());
  CHECK(second.faces.size() == first.faces.size());
  for (size_t i = 0; i < first.vertices.size(); ++i)
    CHECK(norm(second.vertices[i] - first.vertices[i]) == 0.0);
}
