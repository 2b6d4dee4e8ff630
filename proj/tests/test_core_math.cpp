#include "doctest.h"
#include "vistrace/camera.hpp"
#include "vistrace/homography.hpp"
#include "vistrace/math.hpp"
#include "vistrace/sampler.hpp"

using namespace vistrace;

namespace {

double orthonormality_error(const Rotation3& r) {
  const Mat3 rtr = r.transposed() * r;
  double worst = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      worst = std::fmax(worst, std::abs(rtr.m[i][j] - (i == j ? 1.0 : 0.0)));
  return worst;
}

// independent Rodrigues formula (active rotation) for cross-checking the
// Cayley map: R = cos I + sin [a x] + (1 - cos) a a^T
Rotation3 axis_angle(const Vec3& axis, double angle) {
  const Vec3 a = normalize(axis);
  const double c = std::cos(angle), s = std::sin(angle);
  Rotation3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r.m[i][j] = (i == j ? c : 0.0);
  const Mat3 k = skew(a);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      r.m[i][j] += s * k.m[i][j] + (1 - c) * (a[i] * a[j]);
  return r;
}

}  // namespace

TEST_CASE("crp_to_rotation: zero CRP is the identity") {
  const Rotation3 r = crp_to_rotation({0, 0, 0});
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(r.m[i][j] == doctest::Approx(i == j ? 1 : 0));
}

TEST_CASE("crp_to_rotation: q=(1,0,0) evaluates the Cayley transform") {
  const Rotation3 r = crp_to_rotation({1, 0, 0});
  const double expected[3][3] = {{1, 0, 0}, {0, 0, 1}, {0, -1, 0}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(r.m[i][j] == doctest::Approx(expected[i][j]).epsilon(1e-14));
  CHECK(orthonormality_error(r) < 1e-12);
}

TEST_CASE("crp_to_rotation: 45 degrees about z matches the axis-angle oracle") {
  const double q3 = std::tan(kPi / 8.0);
  const Rotation3 r = crp_to_rotation({0, 0, q3});
  CHECK(r.m[0][0] == doctest::Approx(0.7071067811865476).epsilon(1e-13));
  CHECK(r.m[1][1] == doctest::Approx(0.7071067811865476).epsilon(1e-13));

  // CRP q = tan(theta/2) axis describes the same frame rotation as the
  // transposed active axis-angle matrix
  const Rotation3 oracle = axis_angle({0, 0, 1}, kPi / 4.0).transposed();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(r.m[i][j] == doctest::Approx(oracle.m[i][j]).epsilon(1e-13));
}

TEST_CASE("crp_to_rotation: rejects non-finite input") {
  CHECK_THROWS_AS(crp_to_rotation({std::numeric_limits<double>::quiet_NaN(), 0, 0}),
                  std::invalid_argument);
}

TEST_CASE("crp rotations stay orthonormal and obey R(-q) = R(q)^T") {
  Rng rng(2024);
  for (int trial = 0; trial < 2000; ++trial) {
    const Vec3 q{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
    const Rotation3 r = crp_to_rotation(q);
    CHECK(orthonormality_error(r) < 1e-12);
    CHECK(std::abs(det(r) - 1.0) < 1e-12);

    const Rotation3 rneg = crp_to_rotation(-q);
    const Rotation3 rt = r.transposed();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(rneg.m[i][j] == doctest::Approx(rt.m[i][j]));
  }
}

TEST_CASE("rotation_to_crp inverts crp_to_rotation") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 q{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const Vec3 back = rotation_to_crp(crp_to_rotation(q));
    CHECK(norm(back - q) < 1e-12 * (1 + norm(q)));
  }
}

TEST_CASE("camera_basis: overhead pose from the bundled stereo geometry") {
  const auto [u, v, w] = camera_basis({0, 0, 800}, {0, 0, 0}, {1, 0, 0});
  CHECK(norm(w - Vec3{0, 0, 1}) < 1e-15);
  // orthonormal right-handed regardless of the in-plane convention
  CHECK(std::abs(dot(u, v)) < 1e-15);
  CHECK(std::abs(dot(u, w)) < 1e-15);
  CHECK(norm(cross(u, v) - w) < 1e-12);
}

TEST_CASE("camera_basis: unit-distance camera on the z axis") {
  const auto [u, v, w] = camera_basis({0, 0, 1}, {0, 0, 0}, {0, 1, 0});
  CHECK(norm(w - Vec3{0, 0, 1}) < 1e-15);
  CHECK(norm(u - Vec3{1, 0, 0}) < 1e-15);
  CHECK(norm(v - Vec3{0, 1, 0}) < 1e-15);
}

TEST_CASE("camera_basis: up parallel to the view axis is a configuration error") {
  CHECK_THROWS_AS(camera_basis({0, 0, 5}, {0, 0, 0}, {0, 0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(camera_basis({0, 0, 0}, {0, 0, 0}, {0, 1, 0}), std::invalid_argument);
}

TEST_CASE("camera_basis stays orthonormal over random setups") {
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const Vec3 origin{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10)};
    const Vec3 target{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10)};
    const Vec3 up{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    if (norm(origin - target) < 1e-3) continue;
    if (norm(cross(up, origin - target)) < 1e-3) continue;
    const auto [u, v, w] = camera_basis(origin, target, up);
    CHECK(norm(cross(u, v) - w) < 1e-12);
    CHECK(std::abs(norm(u) - 1) < 1e-12);
    CHECK(std::abs(norm(v) - 1) < 1e-12);
    CHECK(std::abs(norm(w) - 1) < 1e-12);
  }
}

TEST_CASE("pose_to_homography: identity rotation keeps the translation column") {
  CameraIntrinsics k;  // f = 1, o = 0
  const Homography h = pose_to_homography({{0, 0, 0}, {0, 0, 5}}, k);
  const double expected[12] = {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 5};
  for (int i = 0; i < 12; ++i) CHECK(h[i] == doctest::Approx(expected[i]));
}

TEST_CASE("pose_to_homography: K = diag(f, f, 1) scales the translation column") {
  CameraIntrinsics k{3.5, 3.5, 0, 0};
  const Homography h = pose_to_homography({{0, 0, 0}, {2, -1, 7}}, k);
  CHECK(h[3] == doctest::Approx(3.5 * 2));
  CHECK(h[7] == doctest::Approx(3.5 * -1));
  CHECK(h[11] == doctest::Approx(7));
}

TEST_CASE("pose_to_homography: rotation block equals crp_to_rotation") {
  CameraIntrinsics k;
  const Vec3 q{1, 0, 0};
  const Homography h = pose_to_homography({q, {0, 0, 0}}, k);
  const Rotation3 r = crp_to_rotation(q);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(h[4 * i + j] == doctest::Approx(r.m[i][j]));
}

TEST_CASE("project: pinhole divide") {
  Homography h;
  h.h = {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0};
  double u, v;
  project(h, {1, 2, 4}, u, v);
  CHECK(u == doctest::Approx(0.25));
  CHECK(v == doctest::Approx(0.5));
}

TEST_CASE("project: invariant under scaling of H") {
  Homography h;
  h.h = {2, 0.1, 0, 0.3, 0, 1.7, 0.2, 0, 0.05, 0, 1, 4};
  Homography h7 = h;
  for (double& x : h7.h) x *= 7.0;
  double u1, v1, u2, v2;
  project(h, {0.4, -0.2, 1.5}, u1, v1);
  project(h7, {0.4, -0.2, 1.5}, u2, v2);
  CHECK(u1 == doctest::Approx(u2).epsilon(1e-14));
  CHECK(v1 == doctest::Approx(v2).epsilon(1e-14));
}

TEST_CASE("project: pose with focal length 100") {
  CameraIntrinsics k{100, 100, 0, 0};
  const Homography h = pose_to_homography({{0, 0, 0}, {0, 0, 10}}, k);
  double u, v;
  project(h, {1, 0, 0}, u, v);
  CHECK(u == doctest::Approx(10.0));
  CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("project: degenerate depth raises") {
  Homography h;
  h.h = {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0};
  double u, v;
  CHECK_THROWS_AS(project(h, {1, 2, 0}, u, v), std::domain_error);
}

TEST_CASE("thin_lens_image_distance") {
  CHECK(thin_lens_image_distance(1.0, 2.0) == doctest::Approx(2.0));
  CHECK(thin_lens_image_distance(1.0, 1.5) == doctest::Approx(3.0));
  // d_f -> infinity approaches f
  CHECK(thin_lens_image_distance(1.0, 1e9) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(thin_lens_image_distance(1.0, 0.5), std::invalid_argument);
}

TEST_CASE("projection agrees with the ray through the same pixel") {
  const CameraModel cam = make_camera({2, -1, 8}, {0.3, 0.2, 0}, {0, 1, 0},
                                      deg_to_rad(50), 320, 240);
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const double px = rng.uniform(0, 320), py = rng.uniform(0, 240);
    const Ray ray = pinhole_ray(cam, px, py);
    const Vec3 p = ray.at(rng.uniform(1, 30));
    double u, v;
    project_point(cam, p, u, v);
    CHECK(u == doctest::Approx(px).epsilon(1e-9));
    CHECK(v == doctest::Approx(py).epsilon(1e-9));
  }
}
