#include <algorithm>
#include <filesystem>

#include "doctest.h"
#include "vistrace/pnp.hpp"
#include "vistrace/sampler.hpp"

using namespace vistrace;

namespace {

// central-difference Jacobian of the pixel model, the oracle the analytic
// rows are validated against
Eigen::MatrixXd finite_difference_jacobian(const Pose& x, const std::vector<Vec3>& points,
                                           const CameraIntrinsics& k, double delta = 1e-6) {
  Eigen::MatrixXd jac(2 * points.size(), 6);
  double params[6] = {x.q.x, x.q.y, x.q.z, x.t.x, x.t.y, x.t.z};
  for (int c = 0; c < 6; ++c) {
    double plus[6], minus[6];
    std::copy(params, params + 6, plus);
    std::copy(params, params + 6, minus);
    plus[c] += delta;
    minus[c] -= delta;
    const Pose xp{{plus[0], plus[1], plus[2]}, {plus[3], plus[4], plus[5]}};
    const Pose xm{{minus[0], minus[1], minus[2]}, {minus[3], minus[4], minus[5]}};
    jac.col(c) = (project_points(xp, points, k) - project_points(xm, points, k)) /
                 (2.0 * delta);
  }
  return jac;
}

std::vector<Vec3> random_points(Rng& rng, int count, double depth_center) {
  std::vector<Vec3> points(count);
  for (auto& p : points)
    p = {rng.uniform(-2, 2), rng.uniform(-2, 2), depth_center + rng.uniform(-2, 2)};
  return points;
}

Pose random_pose(Rng& rng, double q_extent) {
  return {{rng.uniform(-q_extent, q_extent), rng.uniform(-q_extent, q_extent),
           rng.uniform(-q_extent, q_extent)},
          {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(8, 15)}};
}

std::vector<Correspondence> synthesize(const Pose& truth, const std::vector<Vec3>& points,
                                       const CameraIntrinsics& k, Rng* noise = nullptr,
                                       double sigma = 0.0) {
  const Eigen::VectorXd uv = project_points(truth, points, k);
  std::vector<Correspondence> list(points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    list[i].world = points[i];
    list[i].u = uv(2 * i) + (noise ? sigma * noise->gaussian() : 0.0);
    list[i].v = uv(2 * i + 1) + (noise ? sigma * noise->gaussian() : 0.0);
  }
  return list;
}

double rotation_angle_between(const Vec3& qa, const Vec3& qb) {
  const Rotation3 ra = crp_to_rotation(qa);
  const Rotation3 rb = crp_to_rotation(qb);
  const Mat3 rel = ra * rb.transposed();
  const double tr = rel.m[0][0] + rel.m[1][1] + rel.m[2][2];
  return std::acos(std::clamp(0.5 * (tr - 1.0), -1.0, 1.0));
}

}  // namespace

TEST_CASE("g_of_x: identity rotation carries the translation into h4/h8/h12") {
  const auto h = g_of_x({{0, 0, 0}, {1, 2, 3}});
  const double expected[12] = {1, 0, 0, 1, 0, 1, 0, 2, 0, 0, 1, 3};
  for (int i = 0; i < 12; ++i) CHECK(h[i] == doctest::Approx(expected[i]));
}

TEST_CASE("g_of_x: translation entries ignore the attitude") {
  Rng rng(2);
  for (int i = 0; i < 50; ++i) {
    const Pose x = random_pose(rng, 2.0);
    const auto h = g_of_x(x);
    CHECK(h[3] == x.t.x);
    CHECK(h[7] == x.t.y);
    CHECK(h[11] == x.t.z);
  }
}

TEST_CASE("g_of_x: rotation block equals crp_to_rotation") {
  const Vec3 q{1, 0, 0};
  const auto h = g_of_x({q, {0, 0, 0}});
  const Rotation3 r = crp_to_rotation(q);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(h[4 * i + j] == doctest::Approx(r.m[i][j]));
}

TEST_CASE("f_of_h: identity homography projects by the pinhole divide") {
  std::array<double, 12> h{1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0};
  const Eigen::VectorXd uv = f_of_h(h, {{1, 2, 4}});
  CHECK(uv(0) == doctest::Approx(0.25));
  CHECK(uv(1) == doctest::Approx(0.5));
}

TEST_CASE("f_of_h: scale invariance and matching the core projection") {
  std::array<double, 12> h{2, 0.1, 0, 0.3, 0, 1.7, 0.2, 0, 0.05, 0, 1, 4};
  std::array<double, 12> h3 = h;
  for (double& x : h3) x *= 3.0;
  const std::vector<Vec3> pts{{0.4, -0.2, 1.5}, {1, 1, 2}};
  const Eigen::VectorXd a = f_of_h(h, pts);
  const Eigen::VectorXd b = f_of_h(h3, pts);
  CHECK((a - b).lpNorm<Eigen::Infinity>() < 1e-12);

  CameraIntrinsics k{100, 100, 0, 0};
  const Eigen::VectorXd uv = project_points({{0, 0, 0}, {0, 0, 10}}, {{1, 0, 0}}, k);
  CHECK(uv(0) == doctest::Approx(10.0));
  CHECK(uv(1) == doctest::Approx(0.0));
}

TEST_CASE("f_of_h: degenerate depth names the offending point") {
  std::array<double, 12> h{1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0};
  try {
    f_of_h(h, {{1, 1, 5}, {1, 2, 0}});
    FAIL("expected degenerate-depth error");
  } catch (const std::domain_error& e) {
    CHECK(std::string(e.what()).find("point 1") != std::string::npos);
  }
}

TEST_CASE("jacobian_f: structural zeros in the u and v rows") {
  Rng rng(6);
  std::array<double, 12> h{1.2, 0.1, -0.2, 0.4, 0.05, 0.9, 0.3, -0.1, 0.02, -0.03, 1, 6};
  const auto points = random_points(rng, 5, 0.0);
  const Eigen::MatrixXd jf = jacobian_f(h, points);
  for (int i = 0; i < 5; ++i) {
    for (int c = 4; c < 8; ++c) CHECK(jf(2 * i, c) == 0.0);      // du/dh5..h8
    for (int c = 0; c < 4; ++c) CHECK(jf(2 * i + 1, c) == 0.0);  // dv/dh1..h4
  }
}

TEST_CASE("jacobian_g: translation rows are unit selectors") {
  Rng rng(12);
  for (int i = 0; i < 20; ++i) {
    const Eigen::MatrixXd jg = jacobian_g(random_pose(rng, 2.0));
    for (int col = 0; col < 6; ++col) {
      CHECK(jg(3, col) == (col == 3 ? 1.0 : 0.0));
      CHECK(jg(7, col) == (col == 4 ? 1.0 : 0.0));
      CHECK(jg(11, col) == (col == 5 ? 1.0 : 0.0));
    }
    // translation never feeds the rotation block
    for (int row : {0, 1, 2, 4, 5, 6, 8, 9, 10})
      for (int col = 3; col < 6; ++col) CHECK(jg(row, col) == 0.0);
  }
}

TEST_CASE("jacobian_g matches finite differences of g row by row") {
  Rng rng(14);
  for (int trial = 0; trial < 50; ++trial) {
    const Pose x = random_pose(rng, 2.0);
    const Eigen::MatrixXd jg = jacobian_g(x);
    const double delta = 1e-7;
    for (int c = 0; c < 3; ++c) {
      Pose plus = x, minus = x;
      (c == 0 ? plus.q.x : c == 1 ? plus.q.y : plus.q.z) += delta;
      (c == 0 ? minus.q.x : c == 1 ? minus.q.y : minus.q.z) -= delta;
      const auto hp = g_of_x(plus), hm = g_of_x(minus);
      for (int r = 0; r < 12; ++r) {
        const double fd = (hp[r] - hm[r]) / (2 * delta);
        CHECK(jg(r, c) == doctest::Approx(fd).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("analytic_jacobian agrees with central differences") {
  Rng rng(2718);
  const CameraIntrinsics k{400, 400, 320, 240};
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Pose x = random_pose(rng, 2.0);
    const auto points = random_points(rng, 10, 0.0);
    const Eigen::MatrixXd analytic = analytic_jacobian(x, points, k);
    const Eigen::MatrixXd fd = finite_difference_jacobian(x, points, k);
    const double err = (analytic - fd).lpNorm<Eigen::Infinity>() /
                       std::fmax(1.0, fd.lpNorm<Eigen::Infinity>());
    worst = std::fmax(worst, err);
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("lm_solve: starting at the truth terminates immediately") {
  Rng rng(5);
  const CameraIntrinsics k{500, 500, 250, 250};
  const Pose truth = random_pose(rng, 0.5);
  const auto points = random_points(rng, 12, 0.0);
  const auto correspondences = synthesize(truth, points, k);
  const LmReport report = lm_solve(correspondences, k, truth);
  CHECK(report.iterations == 0);
  CHECK(report.chi2 == doctest::Approx(0.0));
  CHECK(norm(report.pose.q - truth.q) < 1e-12);
}

TEST_CASE("lm_minimize: affine model reaches the closed-form solution in <= 3 accepted steps") {
  Rng rng(31);
  const int m = 12, n = 4;
  Eigen::MatrixXd a(m, n);
  Eigen::VectorXd b(m), y(m);
  for (int i = 0; i < m; ++i) {
    b(i) = rng.uniform(-1, 1);
    y(i) = rng.uniform(-5, 5);
    for (int j = 0; j < n; ++j) a(i, j) = rng.uniform(-2, 2);
  }
  LmModel model;
  model.predict = [&](const Eigen::VectorXd& x) { return a * x + b; };
  model.jacobian = [&](const Eigen::VectorXd&) { return a; };

  const Eigen::VectorXd closed_form =
      (a.transpose() * a).ldlt().solve(a.transpose() * (y - b));
  const LmReport report = lm_minimize(model, y, Eigen::VectorXd::Zero(n));
  CHECK(report.accepted_steps <= 3);
  CHECK((report.parameters - closed_form).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("lm_solve: synthetic PnP recovery from a perturbed start") {
  Rng rng(161);
  const CameraIntrinsics k{500, 500, 250, 250};
  const Pose truth{{0.2, -0.1, 0.3}, {0.4, -0.2, 12.0}};
  const auto points = random_points(rng, 20, 0.0);
  const auto correspondences = synthesize(truth, points, k);

  // 5 degree rotation offset, 5% translation offset
  const Vec3 axis = normalize(Vec3{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
  const Vec3 dq = axis * std::tan(deg_to_rad(5.0) / 2.0);
  Pose x0;
  x0.q = rotation_to_crp(crp_to_rotation(dq) * crp_to_rotation(truth.q));
  x0.t = truth.t * 1.05;

  const LmReport report = lm_solve(correspondences, k, x0);
  CHECK(report.iterations <= 50);
  CHECK(report.reprojection_rms(points.size()) < 1e-6);
  CHECK(rotation_angle_between(report.pose.q, truth.q) < 1e-4);
  CHECK(norm(report.pose.t - truth.t) < 1e-4);

  // accepted chi^2 strictly decreases; lambda respects its bounds
  double last = std::numeric_limits<double>::infinity();
  for (const LmIteration& it : report.history) {
    CHECK(it.lambda >= 1e-7);
    CHECK(it.lambda <= 1e7);
    if (it.iteration == 0) { last = it.chi2; continue; }
    if (it.accepted) {
      CHECK(it.chi2 < last);
      last = it.chi2;
    }
  }
}

TEST_CASE("lm_solve: uniform weight scaling leaves the accepted-step sequence unchanged") {
  Rng rng(99);
  const CameraIntrinsics k{500, 500, 250, 250};
  const Pose truth{{0.1, 0.2, -0.1}, {0.5, 0.1, 10.0}};
  const auto points = random_points(rng, 15, 0.0);
  Rng noise(1);
  const auto correspondences = synthesize(truth, points, k, &noise, 0.5);
  Pose x0 = truth;
  x0.t.z *= 1.08;
  x0.q.x += 0.05;

  LmConfig plain;
  LmConfig scaled;
  scaled.weights = 37.0 * Eigen::VectorXd::Ones(2 * points.size());
  const LmReport a = lm_solve(correspondences, k, x0, plain);
  const LmReport b = lm_solve(correspondences, k, x0, scaled);
  REQUIRE(a.history.size() == b.history.size());
  for (size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].accepted == b.history[i].accepted);
    CHECK(a.history[i].lambda == doctest::Approx(b.history[i].lambda));
    CHECK(b.history[i].chi2 == doctest::Approx(37.0 * a.history[i].chi2));
  }
  CHECK(norm(a.pose.t - b.pose.t) < 1e-9);
}

TEST_CASE("lm_solve: gauge check over random noise-free problems") {
  Rng rng(424242);
  const CameraIntrinsics k{500, 500, 250, 250};
  for (int trial = 0; trial < 20; ++trial) {
    const Pose truth = random_pose(rng, 0.4);
    const auto points = random_points(rng, 8, 0.0);
    const auto correspondences = synthesize(truth, points, k);
    Pose x0 = truth;
    x0.q += Vec3{rng.uniform(-0.03, 0.03), rng.uniform(-0.03, 0.03), rng.uniform(-0.03, 0.03)};
    x0.t += Vec3{rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)};
    const LmReport report = lm_solve(correspondences, k, x0);

    const Rotation3 rel =
        crp_to_rotation(report.pose.q) * crp_to_rotation(truth.q).transposed();
    double err = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        err = std::fmax(err, std::abs(rel.m[i][j] - (i == j ? 1.0 : 0.0)));
    CHECK(err < 1e-6);
    CHECK(norm(report.pose.t - truth.t) < 1e-6);
  }
}

TEST_CASE("lm_solve: measurement noise leaves a residual near sigma") {
  Rng rng(777);
  const CameraIntrinsics k{500, 500, 250, 250};
  const Pose truth{{0.1, -0.2, 0.15}, {0.3, 0.4, 11.0}};
  const auto points = random_points(rng, 50, 0.0);
  Rng noise(3);
  const double sigma = 0.5;
  const auto correspondences = synthesize(truth, points, k, &noise, sigma);
  Pose x0 = truth;
  x0.t.z *= 1.05;
  const LmReport report = lm_solve(correspondences, k, x0);
  const double rms = report.reprojection_rms(points.size());
  CHECK(rms > sigma / 2);
  CHECK(rms < sigma * 2);
}

TEST_CASE("estimate_pose: fewer than 4 correspondences is an error") {
  const CameraIntrinsics k{500, 500, 250, 250};
  std::vector<Correspondence> three(3);
  CHECK_THROWS_AS(estimate_pose(three, k, Pose{}), std::invalid_argument);
}

TEST_CASE("correspondence files round-trip") {
  std::vector<Correspondence> list{
      {{1, 2, 3}, 100.5, 200.25}, {{-0.5, 0.125, 9}, 0.0, 499.0}};
  const auto path = (std::filesystem::temp_directory_path() / "vt_corr.txt").string();
  save_correspondences(list, path);
  const auto back = load_correspondences(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].world.z == 3.0);
  CHECK(back[1].u == 0.0);
  CHECK(back[1].v == 499.0);
}
