// vistrace: render a scene, extract sensor products, run the stereo
// triangulation demo, or estimate a pose from rendered features.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "vistrace/image.hpp"
#include "vistrace/mesh.hpp"
#include "vistrace/pnp.hpp"
#include "vistrace/render.hpp"
#include "vistrace/scene_config.hpp"
#include "vistrace/sensors.hpp"

using namespace vistrace;

namespace {

void set_threads(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

int run_render(const std::string& scene_path, const std::string& out,
               int spp_override, long seed_override, double stops_override,
               bool has_stops, const std::string& radiance_out) {
  SceneConfig cfg = parse_scene_file(scene_path);
  if (spp_override > 0) cfg.sampler.spp = spp_override;
  if (seed_override >= 0) cfg.sampler.seed = static_cast<uint64_t>(seed_override);
  if (has_stops) cfg.exposure_stops = stops_override;

  const Scene scene = build_scene(cfg);
  const CameraModel camera = build_camera(cfg);
  RenderStats stats;
  RadianceImage image = render(scene, camera, cfg.sampler, &stats);
  if (stats.nonfinite_clamped.load() > 0)
    std::fprintf(stderr, "warning: %ld non-finite path estimates clamped to zero\n",
                 stats.nonfinite_clamped.load());

  if (!radiance_out.empty()) {
    std::vector<float> linear(image.pixels.size() * 3);
    for (size_t i = 0; i < image.pixels.size(); ++i) {
      linear[3 * i] = static_cast<float>(image.pixels[i].x);
      linear[3 * i + 1] = static_cast<float>(image.pixels[i].y);
      linear[3 * i + 2] = static_cast<float>(image.pixels[i].z);
    }
    write_fimg(linear, image.width, image.height, 3, radiance_out);
  }

  apply_exposure(image, cfg.exposure_stops);
  write_ppm(image, out);
  std::printf("render: %dx%d spp=%d seed=%llu -> %s\n", image.width, image.height,
              cfg.sampler.spp, static_cast<unsigned long long>(cfg.sampler.seed),
              out.c_str());
  return 0;
}

int run_depth(const std::string& scene_path, const std::string& out_stem, int contours) {
  const SceneConfig cfg = parse_scene_file(scene_path);
  const Scene scene = build_scene(cfg);
  const CameraModel camera = build_camera(cfg);

  const DepthMap map = depth_map(scene, camera);
  std::vector<float> flat(map.t.size());
  for (size_t i = 0; i < map.t.size(); ++i) flat[i] = static_cast<float>(map.t[i]);
  write_fimg(flat, map.width, map.height, 1, out_stem + ".fimg");
  write_depth_preview_pgm(map, out_stem + ".pgm");

  const PointCloud cloud = point_cloud(scene, camera);
  write_point_cloud_xyz(cloud, out_stem + ".xyz");

  if (contours > 0) {
    const auto bands = contour_map(map.t, map.width, map.height, contours);
    write_contour_pgm(bands, map.width, map.height, contours, out_stem + "_contour.pgm");
  }
  std::printf("depth: %zu hit pixels of %zu -> %s.{fimg,pgm,xyz}\n", cloud.points.size(),
              map.t.size(), out_stem.c_str());
  return 0;
}

int run_stereo(const std::string& left_path, const std::string& right_path,
               const std::string& out, double noise_sigma, int count, long seed) {
  const SceneConfig left_cfg = parse_scene_file(left_path);
  const SceneConfig right_cfg = parse_scene_file(right_path);
  if (left_cfg.objects_digest != right_cfg.objects_digest)
    throw ConfigError("stereo: the two scene files describe different worlds");

  const Scene scene = build_scene(left_cfg);
  const CameraModel left = build_camera(left_cfg);
  const CameraModel right = build_camera(right_cfg);
  const StereoRig rig = make_rig(left, right);

  // ground-truth 3D features: first-hit points seen from the left camera
  const PointCloud cloud = point_cloud(scene, left);
  if (cloud.points.empty()) throw ConfigError("stereo: left view sees no geometry");

  std::vector<size_t> order(cloud.points.size());
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(static_cast<uint64_t>(seed));
  for (size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[static_cast<size_t>(rng.uniform(0, double(i)))]);

  std::ofstream csv(out);
  if (!csv) throw ConfigError("stereo: cannot open output " + out);
  csv << "est_x,est_y,est_z,true_x,true_y,true_z,err_pct_x,err_pct_y,err_pct_z\n";

  const Rotation3 to_left = left.world_to_camera();
  int used = 0;
  double max_abs_delta = 0;
  std::vector<double> errs_x, errs_y, errs_z;
  char buf[320];
  for (size_t idx : order) {
    if (used >= count) break;
    const Vec3& p = cloud.points[idx].position;
    double ul, vl, ur, vr;
    try {
      project_point(left, p, ul, vl);
      project_point(right, p, ur, vr);
    } catch (const std::domain_error&) {
      continue;  // behind one of the cameras
    }
    if (ul < 0 || ul >= left.width || vl < 0 || vl >= left.height) continue;
    if (ur < 0 || ur >= right.width || vr < 0 || vr >= right.height) continue;

    if (noise_sigma > 0) {
      ul += noise_sigma * rng.gaussian();
      vl += noise_sigma * rng.gaussian();
      ur += noise_sigma * rng.gaussian();
      vr += noise_sigma * rng.gaussian();
    }

    Vec3 estimate;
    try {
      estimate = triangulate(rig, ul, vl, ur, vr);
    } catch (const std::domain_error&) {
      continue;
    }
    const Vec3 truth = to_left * (p - left.origin);
    const Vec3 err = relative_error_pct(estimate, truth);
    max_abs_delta = std::fmax(max_abs_delta, max_component({std::abs(estimate.x - truth.x),
                                                            std::abs(estimate.y - truth.y),
                                                            std::abs(estimate.z - truth.z)}));
    if (std::isfinite(err.x)) errs_x.push_back(err.x);
    if (std::isfinite(err.y)) errs_y.push_back(err.y);
    if (std::isfinite(err.z)) errs_z.push_back(err.z);
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.6g,%.6g,%.6g\n",
                  estimate.x, estimate.y, estimate.z, truth.x, truth.y, truth.z, err.x,
                  err.y, err.z);
    csv << buf;
    ++used;
  }

  auto median = [](std::vector<double>& v) {
    if (v.empty()) return 0.0;
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
  };
  std::printf("stereo: %d points, max |delta| = %.3g, median %%err = (%.3g, %.3g, %.3g)\n",
              used, max_abs_delta, median(errs_x), median(errs_y), median(errs_z));
  if (used == 0) throw ConfigError("stereo: no usable correspondences");
  return 0;
}

Pose parse_pose_arg(const std::string& text) {
  Pose pose;
  double* slots[6] = {&pose.q.x, &pose.q.y, &pose.q.z, &pose.t.x, &pose.t.y, &pose.t.z};
  std::string cleaned = text;
  std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
  std::istringstream ss(cleaned);
  for (double* slot : slots)
    if (!(ss >> *slot))
      throw ConfigError("pose: --init expects qx,qy,qz,tx,ty,tz");
  return pose;
}

CameraModel camera_at_pose(const Pose& pose, const CameraModel& reference) {
  const Rotation3 r = crp_to_rotation(pose.q);
  CameraModel cam = reference;
  cam.origin = r.transposed() * (-pose.t);
  cam.basis.u = {r.m[0][0], r.m[0][1], r.m[0][2]};
  cam.basis.v = -Vec3{r.m[1][0], r.m[1][1], r.m[1][2]};
  cam.basis.w = -Vec3{r.m[2][0], r.m[2][1], r.m[2][2]};
  return cam;
}

int run_pose(const std::string& scene_path, const std::string& mesh_path,
             const std::string& init_text, const std::string& out, double noise_sigma,
             int features, long seed, const std::string& corr_path,
             const std::string& image_out) {
  const SceneConfig cfg = parse_scene_file(scene_path);
  const CameraModel reference = build_camera(cfg);
  const CameraIntrinsics k = reference.intrinsics();
  const Pose x0 = parse_pose_arg(init_text);

  std::vector<Correspondence> correspondences;
  if (!corr_path.empty()) {
    correspondences = load_correspondences(corr_path);
  } else {
    const TriangleMesh mesh = load_obj_file(mesh_path);
    if (mesh.vertices.empty()) throw ConfigError("pose: mesh has no vertices");
    const Pose truth = reference.pose();  // throws at the CRP singularity

    const size_t stride = std::max<size_t>(1, mesh.vertices.size() / features);
    Rng rng(static_cast<uint64_t>(seed));
    for (size_t i = 0; i < mesh.vertices.size() && correspondences.size() <
                                                       static_cast<size_t>(features);
         i += stride) {
      Correspondence c;
      c.world = mesh.vertices[i];
      double u, v;
      project_point(reference, c.world, u, v);
      c.u = u + (noise_sigma > 0 ? noise_sigma * rng.gaussian() : 0.0);
      c.v = v + (noise_sigma > 0 ? noise_sigma * rng.gaussian() : 0.0);
      correspondences.push_back(c);
    }
    (void)truth;
  }

  const LmReport report = estimate_pose(correspondences, k, x0);
  write_report_csv(report, out);
  std::printf("pose: %s after %d iterations (%d accepted), chi2 = %.6g, rms = %.6g px\n",
              to_string(report.stop).c_str(), report.iterations, report.accepted_steps,
              report.chi2, report.reprojection_rms(correspondences.size()));
  std::printf("pose: q = (%.9g, %.9g, %.9g)  t = (%.9g, %.9g, %.9g)\n", report.pose.q.x,
              report.pose.q.y, report.pose.q.z, report.pose.t.x, report.pose.t.y,
              report.pose.t.z);

  if (!image_out.empty()) {
    // render the mesh from the estimated pose for visual comparison
    SceneConfig render_cfg = cfg;
    render_cfg.spheres.clear();
    render_cfg.meshes.clear();
    MeshSpec spec;
    spec.obj_path = std::filesystem::absolute(mesh_path).string();
    render_cfg.base_dir = "/";
    render_cfg.meshes.push_back(spec);
    Scene scene = build_scene(render_cfg);
    if (scene.lights.empty()) {
      LightSource headlight;
      headlight.kind = LightKind::point;
      headlight.position = camera_at_pose(report.pose, reference).origin;
      const double span = 100.0;
      headlight.intensity = {span, span, span};
      scene.lights.push_back(headlight);
    }
    RadianceImage image =
        render(scene, camera_at_pose(report.pose, reference), render_cfg.sampler);
    apply_exposure(image, render_cfg.exposure_stops);
    write_ppm(image, image_out);
  }
  return report.stop == LmStop::stalled ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"space-scene ray tracing and vision-navigation toolkit"};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads, "limit OpenMP worker count (0 = default)");

  auto* render_cmd = app.add_subcommand("render", "path-trace a scene to a PPM image");
  std::string scene_path, out_path = "out.ppm", radiance_out;
  int spp = -1;
  long seed = -1;
  double stops = 0.0;
  render_cmd->add_option("scene", scene_path, "scene file (JSON)")->required();
  render_cmd->add_option("-o,--output", out_path, "output PPM path");
  render_cmd->add_option("--spp", spp, "override samples per pixel");
  render_cmd->add_option("--seed", seed, "override sampler seed");
  auto* stops_opt = render_cmd->add_option("--stops", stops, "override exposure stops");
  render_cmd->add_option("--radiance", radiance_out, "also write linear radiance (FIMG)");

  auto* depth_cmd = app.add_subcommand("depth", "first-hit depth, preview, point cloud");
  std::string depth_scene, depth_out = "depth";
  int contours = 0;
  depth_cmd->add_option("scene", depth_scene, "scene file (JSON)")->required();
  depth_cmd->add_option("-o,--output", depth_out, "output stem");
  depth_cmd->add_option("--contours", contours, "also write an N-level contour map");

  auto* stereo_cmd = app.add_subcommand("stereo", "triangulate features from two views");
  std::string left_path, right_path, stereo_out = "points.csv";
  double stereo_noise = 0.0;
  int stereo_count = 100;
  long stereo_seed = 0;
  stereo_cmd->add_option("left", left_path, "left scene file")->required();
  stereo_cmd->add_option("right", right_path, "right scene file")->required();
  stereo_cmd->add_option("-o,--output", stereo_out, "output CSV path");
  stereo_cmd->add_option("--noise", stereo_noise, "pixel noise sigma");
  stereo_cmd->add_option("--count", stereo_count, "number of feature points");
  stereo_cmd->add_option("--seed", stereo_seed, "feature selection / noise seed");

  auto* pose_cmd = app.add_subcommand("pose", "estimate a pose against a reference view");
  std::string pose_scene, pose_mesh, pose_init, pose_out = "report.csv";
  std::string pose_corr, pose_image;
  double pose_noise = 0.0;
  int pose_features = 50;
  long pose_seed = 0;
  pose_cmd->add_option("scene", pose_scene, "reference scene file")->required();
  pose_cmd->add_option("mesh", pose_mesh, "object mesh (OBJ)")->required();
  pose_cmd->add_option("--init", pose_init, "initial pose qx,qy,qz,tx,ty,tz")->required();
  pose_cmd->add_option("-o,--output", pose_out, "LM report CSV path");
  pose_cmd->add_option("--noise", pose_noise, "pixel noise sigma on measurements");
  pose_cmd->add_option("--features", pose_features, "number of feature correspondences");
  pose_cmd->add_option("--seed", pose_seed, "noise seed");
  pose_cmd->add_option("--corr", pose_corr, "load correspondences from file (x y z u v)");
  pose_cmd->add_option("--image", pose_image, "render the estimated pose to this PPM");

  CLI11_PARSE(app, argc, argv);
  set_threads(threads);

  try {
    if (*render_cmd)
      return run_render(scene_path, out_path, spp, seed, stops, stops_opt->count() > 0,
                        radiance_out);
    if (*depth_cmd) return run_depth(depth_scene, depth_out, contours);
    if (*stereo_cmd)
      return run_stereo(left_path, right_path, stereo_out, stereo_noise, stereo_count,
                        stereo_seed);
    if (*pose_cmd)
      return run_pose(pose_scene, pose_mesh, pose_init, pose_out, pose_noise,
                      pose_features, pose_seed, pose_corr, pose_image);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "vistrace: %s\n", e.what());
    return 1;
  }
  return 0;
}
