#pragma once

// Perspective-n-point pose estimation by damped nonlinear least squares.
// The measurement model is the composition f(g(x)): g maps CRP attitude
// plus translation to the 12-vector homography, f maps the homography and
// the n object points to 2n pixel coordinates. Both Jacobians are analytic
// (closed-form rational derivatives assembled by the chain rule) and the
// solver is Levenberg-Marquardt with Marquardt diagonal scaling and a
// gain-ratio accept/reject rule.

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <string>
#include <vector>

#include "vistrace/camera.hpp"
#include "vistrace/math.hpp"

namespace vistrace {

struct Correspondence {
  Vec3 world;        // object-frame point
  double u = 0, v = 0;  // measured pixel
};

struct LmConfig {
  double lambda0 = 1e-3;
  double lambda_up = 10.0;    // rejected step: lambda *= up (capped)
  double lambda_down = 10.0;  // accepted step: lambda /= down (floored)
  double lambda_min = 1e-7;
  double lambda_max = 1e7;
  double gain_threshold = 1e-3;  // accept when rho exceeds this
  int max_iterations = 200;
  double gradient_tolerance = 1e-8;    // infinity norm of J^T W r
  double cost_tolerance = 1e-10;       // relative chi^2 change on accepted steps
  double step_tolerance = 1e-10;       // relative step norm
  Eigen::VectorXd weights;             // per-residual W diagonal; empty = identity
};

struct LmIteration {
  int iteration = 0;
  double chi2 = 0;
  double lambda = 0;
  double rho = 0;
  bool accepted = false;
};

// Generic residual model: predict may throw std::domain_error (the step is
// then rejected like a failed gain test); jacobian is del predict / del x.
struct LmModel {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> predict;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;
};

enum class LmStop {
  converged_gradient,
  converged_cost,
  converged_step,
  max_iterations,
  stalled,  // lambda pinned at its upper bound with no acceptable step
};

struct LmReport {
  Pose pose;                    // filled by the pose-model entry points
  Eigen::VectorXd parameters;   // final x
  double chi2 = 0;
  int iterations = 0;           // trial steps taken
  int accepted_steps = 0;
  LmStop stop = LmStop::max_iterations;
  std::vector<LmIteration> history;

  double reprojection_rms(size_t n_points) const {
    return n_points ? std::sqrt(chi2 / (2.0 * static_cast<double>(n_points))) : 0.0;
  }
};

std::string to_string(LmStop stop);

// g(x): rows of R(q) interleaved with the translation entries
// (h4, h8, h12) = t. Intrinsics are not folded here.
std::array<double, 12> g_of_x(const Pose& x);

// f(h): interleaved (u_1, v_1, ..., u_n, v_n) rational projections.
// Throws std::domain_error naming the first point whose depth factor
// degenerates (|s| < 1e-12).
Eigen::VectorXd f_of_h(const std::array<double, 12>& h, const std::vector<Vec3>& points);

// del f / del h at h for the given points (2n x 12).
Eigen::MatrixXd jacobian_f(const std::array<double, 12>& h, const std::vector<Vec3>& points);

// del g / del x at x (12 x 6), closed-form derivative rows.
Eigen::MatrixXd jacobian_g(const Pose& x);

// Chain-rule Jacobian of the pixel model with intrinsics folded in:
// J = J_f(K g(x)) * K_fold * J_g(x), shape 2n x 6.
Eigen::MatrixXd analytic_jacobian(const Pose& x, const std::vector<Vec3>& points,
                                  const CameraIntrinsics& k);

// Predicted pixels under pose x and intrinsics K.
Eigen::VectorXd project_points(const Pose& x, const std::vector<Vec3>& points,
                               const CameraIntrinsics& k);

// Core Levenberg-Marquardt loop: minimizes || y - model(x) ||^2_W with
// Marquardt diagonal scaling, gain-ratio acceptance, and damping factors
// clamped to [lambda_min, lambda_max].
LmReport lm_minimize(const LmModel& model, const Eigen::VectorXd& measured,
                     const Eigen::VectorXd& x0, const LmConfig& cfg = {});

// Minimizes || y - f(g(x)) ||^2_W over the pose. Trial steps that push any
// point to a degenerate depth are rejected like a failed gain test.
LmReport lm_solve(const std::vector<Correspondence>& correspondences,
                  const CameraIntrinsics& k, const Pose& x0, const LmConfig& cfg = {});

// Front door used by the CLI: requires >= 4 correspondences.
LmReport estimate_pose(const std::vector<Correspondence>& correspondences,
                       const CameraIntrinsics& k, const Pose& x0,
                       const LmConfig& cfg = {});

// Correspondence file: text lines "x y z u v".
std::vector<Correspondence> load_correspondences(const std::string& path);
void save_correspondences(const std::vector<Correspondence>& list, const std::string& path);

// LmReport rows as CSV: iter,chi2,lambda,rho,accepted.
void write_report_csv(const LmReport& report, const std::string& path);

}  // namespace vistrace
