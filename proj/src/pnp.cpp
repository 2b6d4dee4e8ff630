#include "vistrace/pnp.hpp"

#include <fstream>
#include <sstream>

namespace vistrace {

std::string to_string(LmStop stop) {
  switch (stop) {
    case LmStop::converged_gradient: return "gradient";
    case LmStop::converged_cost: return "cost";
    case LmStop::converged_step: return "step";
    case LmStop::max_iterations: return "max_iterations";
    case LmStop::stalled: return "stalled";
  }
  return "unknown";
}

std::array<double, 12> g_of_x(const Pose& x) {
  const Rotation3 r = crp_to_rotation(x.q);
  return {r.m[0][0], r.m[0][1], r.m[0][2], x.t.x,
          r.m[1][0], r.m[1][1], r.m[1][2], x.t.y,
          r.m[2][0], r.m[2][1], r.m[2][2], x.t.z};
}

Eigen::VectorXd f_of_h(const std::array<double, 12>& h, const std::vector<Vec3>& points) {
  const size_t n = points.size();
  Eigen::VectorXd uv(2 * n);
  for (size_t i = 0; i < n; ++i) {
    const Vec3& p = points[i];
    const double s = h[8] * p.x + h[9] * p.y + h[10] * p.z + h[11];
    if (std::abs(s) < 1e-12)
      throw std::domain_error("f_of_h: degenerate depth at point " + std::to_string(i));
    uv(2 * i) = (h[0] * p.x + h[1] * p.y + h[2] * p.z + h[3]) / s;
    uv(2 * i + 1) = (h[4] * p.x + h[5] * p.y + h[6] * p.z + h[7]) / s;
  }
  return uv;
}

Eigen::MatrixXd jacobian_f(const std::array<double, 12>& h, const std::vector<Vec3>& points) {
  const size_t n = points.size();
  Eigen::MatrixXd jf = Eigen::MatrixXd::Zero(2 * n, 12);
  for (size_t i = 0; i < n; ++i) {
    const Vec3& p = points[i];
    const double s = h[8] * p.x + h[9] * p.y + h[10] * p.z + h[11];
    if (std::abs(s) < 1e-12)
      throw std::domain_error("jacobian_f: degenerate depth at point " + std::to_string(i));
    const double inv_s = 1.0 / s;
    const double u = (h[0] * p.x + h[1] * p.y + h[2] * p.z + h[3]) * inv_s;
    const double v = (h[4] * p.x + h[5] * p.y + h[6] * p.z + h[7]) * inv_s;

    const double coords[4] = {p.x, p.y, p.z, 1.0};
    for (int c = 0; c < 4; ++c) {
      jf(2 * i, c) = coords[c] * inv_s;            // du/dh1..h4 (du/dh5..h8 stay 0)
      jf(2 * i + 1, 4 + c) = coords[c] * inv_s;    // dv/dh5..h8 (dv/dh1..h4 stay 0)
      jf(2 * i, 8 + c) = -u * coords[c] * inv_s;   // shared denominator terms
      jf(2 * i + 1, 8 + c) = -v * coords[c] * inv_s;
    }
  }
  return jf;
}

Eigen::MatrixXd jacobian_g(const Pose& x) {
  const double q1 = x.q.x, q2 = x.q.y, q3 = x.q.z;
  const double d = 1.0 + q1 * q1 + q2 * q2 + q3 * q3;
  const double c = 2.0 / (d * d);

  Eigen::MatrixXd jg = Eigen::MatrixXd::Zero(12, 6);
  // rotation-block rows: derivatives of the Cayley map entries
  jg(0, 0) = c * 2.0 * q1 * (q2 * q2 + q3 * q3);
  jg(0, 1) = -c * 2.0 * q2 * (1.0 + q1 * q1);
  jg(0, 2) = -c * 2.0 * q3 * (1.0 + q1 * q1);

  jg(1, 0) = c * (q2 + q2 * q3 * q3 + q2 * q2 * q2 - 2.0 * q1 * q3 - q1 * q1 * q2);
  jg(1, 1) = c * (q1 * q1 * q1 - q1 * q2 * q2 + q1 * q3 * q3 + q1 - 2.0 * q2 * q3);
  jg(1, 2) = c * (q1 * q1 - 2.0 * q1 * q2 * q3 + q2 * q2 - q3 * q3 + 1.0);

  jg(2, 0) = c * (q3 + q3 * q3 * q3 + q2 * q2 * q3 + 2.0 * q1 * q2 - q1 * q1 * q3);
  jg(2, 1) = -c * (q1 * q1 + 2.0 * q1 * q2 * q3 - q2 * q2 + q3 * q3 + 1.0);
  jg(2, 2) = c * (q1 * q1 * q1 + q1 * q2 * q2 - q1 * q3 * q3 + q1 + 2.0 * q2 * q3);

  jg(3, 3) = 1.0;  // h4 = t1

  jg(4, 0) = c * (-q1 * q1 * q2 + 2.0 * q1 * q3 + q2 * q2 * q2 + q2 * q3 * q3 + q2);
  jg(4, 1) = c * (q1 * q1 * q1 - q1 * q2 * q2 + q1 * q3 * q3 + q1 + 2.0 * q2 * q3);
  jg(4, 2) = -c * (q1 * q1 + 2.0 * q1 * q2 * q3 + q2 * q2 - q3 * q3 + 1.0);

  jg(5, 0) = -c * 2.0 * q1 * (q2 * q2 + 1.0);
  jg(5, 1) = c * 2.0 * q2 * (q1 * q1 + q3 * q3);
  jg(5, 2) = -c * 2.0 * q3 * (q2 * q2 + 1.0);

  jg(6, 0) = c * (-q1 * q1 - 2.0 * q1 * q2 * q3 + q2 * q2 + q3 * q3 + 1.0);
  jg(6, 1) = c * (q1 * q1 * q3 - 2.0 * q1 * q2 - q2 * q2 * q3 + q3 * q3 * q3 + q3);
  jg(6, 2) = c * (q1 * q1 * q2 - 2.0 * q1 * q3 + q2 * q2 * q2 - q2 * q3 * q3 + q2);

  jg(7, 4) = 1.0;  // h8 = t2

  // the printed form of d g9 / d q3 carries a stray minus sign; the true
  // derivative of 2(q3 q1 + q2)/(1 + q^T q) is positive (finite-difference
  // validated)
  jg(8, 0) = c * (-q1 * q1 * q3 - 2.0 * q1 * q2 + q2 * q2 * q3 + q3 * q3 * q3 + q3);
  jg(8, 1) = c * (q1 * q1 - 2.0 * q1 * q2 * q3 - q2 * q2 + q3 * q3 + 1.0);
  jg(8, 2) = c * (q1 * q1 * q1 + q1 * q2 * q2 - q1 * q3 * q3 + q1 - 2.0 * q2 * q3);

  jg(9, 0) = -c * (-q1 * q1 + 2.0 * q1 * q2 * q3 + q2 * q2 + q3 * q3 + 1.0);
  jg(9, 1) = c * (q1 * q1 * q3 + 2.0 * q1 * q2 - q2 * q2 * q3 + q3 * q3 * q3 + q3);
  jg(9, 2) = c * (q1 * q1 * q2 + 2.0 * q1 * q3 + q2 * q2 * q2 - q2 * q3 * q3 + q2);

  jg(10, 0) = -c * 2.0 * q1 * (q3 * q3 + 1.0);
  jg(10, 1) = -c * 2.0 * q2 * (q3 * q3 + 1.0);
  jg(10, 2) = c * 2.0 * q3 * (q1 * q1 + q2 * q2);

  jg(11, 5) = 1.0;  // h12 = t3

  return jg;
}

namespace {

// h_K = K-folded homography: rows 1 and 2 pick up fx/fy and the principal
// point times row 3.
std::array<double, 12> fold_intrinsics(const std::array<double, 12>& h,
                                       const CameraIntrinsics& k) {
  std::array<double, 12> hk{};
  for (int c = 0; c < 4; ++c) {
    hk[0 + c] = k.fx * h[0 + c] + k.ox * h[8 + c];
    hk[4 + c] = k.fy * h[4 + c] + k.oy * h[8 + c];
    hk[8 + c] = h[8 + c];
  }
  return hk;
}

Eigen::MatrixXd fold_intrinsics_jacobian(const Eigen::MatrixXd& jg,
                                         const CameraIntrinsics& k) {
  Eigen::MatrixXd out(12, 6);
  for (int c = 0; c < 4; ++c) {
    out.row(0 + c) = k.fx * jg.row(0 + c) + k.ox * jg.row(8 + c);
    out.row(4 + c) = k.fy * jg.row(4 + c) + k.oy * jg.row(8 + c);
    out.row(8 + c) = jg.row(8 + c);
  }
  return out;
}

}  // namespace

Eigen::VectorXd project_points(const Pose& x, const std::vector<Vec3>& points,
                               const CameraIntrinsics& k) {
  return f_of_h(fold_intrinsics(g_of_x(x), k), points);
}

Eigen::MatrixXd analytic_jacobian(const Pose& x, const std::vector<Vec3>& points,
                                  const CameraIntrinsics& k) {
  const auto hk = fold_intrinsics(g_of_x(x), k);
  return jacobian_f(hk, points) * fold_intrinsics_jacobian(jacobian_g(x), k);
}

namespace {

Eigen::VectorXd pose_to_vector(const Pose& x) {
  Eigen::VectorXd v(6);
  v << x.q.x, x.q.y, x.q.z, x.t.x, x.t.y, x.t.z;
  return v;
}

Pose vector_to_pose(const Eigen::VectorXd& v) {
  return {{v(0), v(1), v(2)}, {v(3), v(4), v(5)}};
}

}  // namespace

LmReport lm_minimize(const LmModel& model, const Eigen::VectorXd& measured,
                     const Eigen::VectorXd& x0, const LmConfig& cfg) {
  Eigen::VectorXd w = cfg.weights;
  if (w.size() == 0) w = Eigen::VectorXd::Ones(measured.size());
  if (w.size() != measured.size())
    throw std::invalid_argument("lm_minimize: weight vector size mismatch");

  LmReport report;
  Eigen::VectorXd x = x0;
  Eigen::VectorXd predicted = model.predict(x);
  Eigen::VectorXd residual = measured - predicted;
  double chi2 = residual.dot(w.cwiseProduct(residual));
  double lambda = cfg.lambda0;

  report.history.push_back({0, chi2, lambda, 0.0, true});

  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    const Eigen::MatrixXd jac = model.jacobian(x);
    const Eigen::MatrixXd jtw = jac.transpose() * w.asDiagonal();
    const Eigen::MatrixXd normal = jtw * jac;
    const Eigen::VectorXd gradient = jtw * residual;  // J^T W (y - y_hat)

    if (gradient.lpNorm<Eigen::Infinity>() < cfg.gradient_tolerance) {
      report.stop = LmStop::converged_gradient;
      break;
    }

    // Marquardt scaling; fall back to identity damping on a tiny diagonal
    Eigen::VectorXd diag = normal.diagonal();
    if (diag.minCoeff() < 1e-12) diag = Eigen::VectorXd::Ones(x.size());

    Eigen::MatrixXd damped = normal;
    damped.diagonal() += lambda * diag;
    Eigen::LDLT<Eigen::MatrixXd> solver(damped);
    bool usable = solver.info() == Eigen::Success;
    Eigen::VectorXd step;
    if (usable) {
      step = solver.solve(gradient);
      usable = step.allFinite();
    }
    if (!usable) {
      if (lambda >= cfg.lambda_max) {
        report.stop = LmStop::stalled;
        break;
      }
      lambda = std::min(lambda * cfg.lambda_up, cfg.lambda_max);
      report.history.push_back({iter, chi2, lambda, 0.0, false});
      report.iterations = iter;
      continue;
    }

    // Evaluate the trial point; a chirality failure rejects the step.
    double trial_chi2 = std::numeric_limits<double>::infinity();
    Eigen::VectorXd trial_predicted;
    bool depth_ok = true;
    const Eigen::VectorXd trial_x = x + step;
    try {
      trial_predicted = model.predict(trial_x);
      const Eigen::VectorXd trial_residual = measured - trial_predicted;
      trial_chi2 = trial_residual.dot(w.cwiseProduct(trial_residual));
    } catch (const std::domain_error&) {
      depth_ok = false;
    }

    // gain ratio: actual over predicted reduction
    const double predicted_gain = step.dot((lambda * diag).cwiseProduct(step) + gradient);
    const double rho = (depth_ok && predicted_gain > 0)
                           ? (chi2 - trial_chi2) / predicted_gain
                           : -1.0;

    const bool accept = depth_ok && rho > cfg.gain_threshold;
    report.history.push_back({iter, accept ? trial_chi2 : chi2, lambda, rho, accept});
    report.iterations = iter;

    if (accept) {
      const double chi2_drop = chi2 - trial_chi2;
      const double step_norm = step.norm();
      x = trial_x;
      residual = measured - trial_predicted;
      chi2 = trial_chi2;
      ++report.accepted_steps;
      lambda = std::fmax(lambda / cfg.lambda_down, cfg.lambda_min);

      if (chi2_drop <= cfg.cost_tolerance * std::fmax(chi2, 1e-300) || chi2 == 0.0) {
        report.stop = LmStop::converged_cost;
        break;
      }
      if (step_norm <= cfg.step_tolerance * (x.norm() + cfg.step_tolerance)) {
        report.stop = LmStop::converged_step;
        break;
      }
    } else {
      if (lambda >= cfg.lambda_max) {
        report.stop = LmStop::stalled;
        break;
      }
      lambda = std::min(lambda * cfg.lambda_up, cfg.lambda_max);
    }
  }

  report.parameters = x;
  report.chi2 = chi2;
  return report;
}

LmReport lm_solve(const std::vector<Correspondence>& correspondences,
                  const CameraIntrinsics& k, const Pose& x0, const LmConfig& cfg) {
  const size_t n = correspondences.size();
  std::vector<Vec3> points(n);
  Eigen::VectorXd measured(2 * n);
  for (size_t i = 0; i < n; ++i) {
    points[i] = correspondences[i].world;
    measured(2 * i) = correspondences[i].u;
    measured(2 * i + 1) = correspondences[i].v;
  }

  LmModel model;
  model.predict = [points, k](const Eigen::VectorXd& x) {
    return project_points(vector_to_pose(x), points, k);
  };
  model.jacobian = [points, k](const Eigen::VectorXd& x) {
    return analytic_jacobian(vector_to_pose(x), points, k);
  };

  LmReport report = lm_minimize(model, measured, pose_to_vector(x0), cfg);
  report.pose = vector_to_pose(report.parameters);
  return report;
}

LmReport estimate_pose(const std::vector<Correspondence>& correspondences,
                       const CameraIntrinsics& k, const Pose& x0, const LmConfig& cfg) {
  if (correspondences.size() < 4)
    throw std::invalid_argument("estimate_pose: need at least 4 correspondences, have " +
                                std::to_string(correspondences.size()));
  return lm_solve(correspondences, k, x0, cfg);
}

std::vector<Correspondence> load_correspondences(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_correspondences: cannot open " + path);
  std::vector<Correspondence> list;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    Correspondence c;
    if (!(ss >> c.world.x >> c.world.y >> c.world.z >> c.u >> c.v))
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected 'x y z u v'");
    list.push_back(c);
  }
  return list;
}

void save_correspondences(const std::vector<Correspondence>& list, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_correspondences: cannot open " + path);
  char buf[200];
  for (const Correspondence& c : list) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g %.17g\n", c.world.x, c.world.y,
                  c.world.z, c.u, c.v);
    out << buf;
  }
}

void write_report_csv(const LmReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_report_csv: cannot open " + path);
  out << "iter,chi2,lambda,rho,accepted\n";
  char buf[200];
  for (const LmIteration& it : report.history) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%d\n", it.iteration, it.chi2,
                  it.lambda, it.rho, it.accepted ? 1 : 0);
    out << buf;
  }
}

}  // namespace vistrace
