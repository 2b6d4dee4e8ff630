// Benchmark: serial reference kernel vs the OpenMP kernel on the same
// scene, verifying bit-identical output while timing both.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "vistrace/render.hpp"
#include "vistrace/sampler.hpp"
#include "vistrace/sensors.hpp"

using namespace vistrace;
namespace chrono = std::chrono;

namespace {

Scene benchmark_scene() {
  Scene scene;
  Material floor_mat;
  floor_mat.kd = floor_mat.albedo = {0.6, 0.6, 0.6};
  Material ball;
  ball.kd = ball.albedo = {0.7, 0.3, 0.2};
  Material lamp;
  lamp.ke = {8, 8, 8};
  lamp.kd = lamp.albedo = {0, 0, 0};
  scene.materials = {floor_mat, ball, lamp};

  // triangulated ground plane, a grid of spheres, one emissive panel
  Rng rng(1);
  const int n = 24;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x0 = -12.0 + i, z0 = -12.0 + j;
      const double y00 = 0.3 * std::sin(0.7 * x0) * std::cos(0.5 * z0);
      const double y10 = 0.3 * std::sin(0.7 * (x0 + 1)) * std::cos(0.5 * z0);
      const double y01 = 0.3 * std::sin(0.7 * x0) * std::cos(0.5 * (z0 + 1));
      const double y11 = 0.3 * std::sin(0.7 * (x0 + 1)) * std::cos(0.5 * (z0 + 1));
      scene.add_triangle({{x0, y00, z0}, {x0 + 1, y10, z0}, {x0 + 1, y11, z0 + 1}}, 0);
      scene.add_triangle({{x0, y00, z0}, {x0 + 1, y11, z0 + 1}, {x0, y01, z0 + 1}}, 0);
    }
  }
  for (int i = 0; i < 60; ++i)
    scene.add_sphere({{rng.uniform(-10, 10), rng.uniform(0.5, 3.0), rng.uniform(-10, 10)},
                      rng.uniform(0.2, 0.8)},
                     1);
  scene.add_triangle({{-4, 9, -4}, {4, 9, -4}, {0, 9, 4}}, 2);
  scene.finalize();

  LightSource sun;
  sun.kind = LightKind::directional;
  sun.direction = normalize(Vec3{-0.3, -1.0, -0.2});
  sun.intensity = {2.5, 2.4, 2.2};
  scene.lights.push_back(sun);
  return scene;
}

double run_ms(const std::function<void()>& fn) {
  const auto t0 = chrono::steady_clock::now();
  fn();
  const auto t1 = chrono::steady_clock::now();
  return chrono::duration<double, std::milli>(t1 - t0).count();
}

bool identical(const RadianceImage& a, const RadianceImage& b) {
  return a.pixels.size() == b.pixels.size() &&
         std::memcmp(a.pixels.data(), b.pixels.data(),
                     a.pixels.size() * sizeof(Rgb)) == 0;
}

}  // namespace

int main(int argc, char** argv) {
  int size = 160;
  int spp = 8;
  if (argc > 1) size = std::atoi(argv[1]);
  if (argc > 2) spp = std::atoi(argv[2]);

  const Scene scene = benchmark_scene();
  const CameraModel cam = make_camera({0, 6, 16}, {0, 0.5, 0}, {0, 1, 0},
                                      deg_to_rad(45), size, size);
  SamplerConfig sampler;
  sampler.spp = spp;
  sampler.max_depth = 12;
  sampler.seed = 7;

  std::printf("render benchmark: %dx%d, %d spp, %zu primitives\n", size, size, spp,
              scene.primitives.size());

  RadianceImage serial_img;
  const double serial_ms = run_ms([&] { serial_img = render_serial(scene, cam, sampler); });
  const double mpixels = size * double(size) * spp / 1e6;
  std::printf("%-12s %10.1f ms   %8.3f Mpaths/s\n", "serial", serial_ms,
              mpixels / (serial_ms / 1000.0));

#ifdef _OPENMP
  const int max_threads = omp_get_max_threads();
  for (int threads = 1; threads <= max_threads; threads *= 2) {
    omp_set_num_threads(threads);
    RadianceImage parallel_img;
    const double ms = run_ms([&] { parallel_img = render_parallel(scene, cam, sampler); });
    const bool ok = identical(serial_img, parallel_img);
    std::printf("omp x%-9d %10.1f ms   %8.3f Mpaths/s   speedup %5.2f   %s\n", threads, ms,
                mpixels / (ms / 1000.0), serial_ms / ms, ok ? "bit-identical" : "MISMATCH");
    if (!ok) return 1;
  }
  // depth kernel, same comparison
  omp_set_num_threads(max_threads);
  DepthMap dserial, dparallel;
  const double ds_ms = run_ms([&] { dserial = depth_map_serial(scene, cam); });
  const double dp_ms = run_ms([&] { dparallel = depth_map(scene, cam); });
  const bool depth_ok = dserial.t == dparallel.t;
  std::printf("depth serial %8.1f ms / omp %8.1f ms   speedup %5.2f   %s\n", ds_ms, dp_ms,
              ds_ms / dp_ms, depth_ok ? "bit-identical" : "MISMATCH");
  if (!depth_ok) return 1;
#else
  std::printf("OpenMP not available; serial only\n");
#endif
  return 0;
}
