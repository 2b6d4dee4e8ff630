#pragma once

// The Monte Carlo path tracer. render_parallel is the OpenMP production
// kernel; render_serial is the plain-loop reference kept for testing and
// benchmarking. Both drive the same per-pixel routine and, because every
// pixel sample draws from its own counter-based stream, produce identical
// images for identical (scene, camera, sampler) inputs.

#include <atomic>

#include "vistrace/camera.hpp"
#include "vistrace/image.hpp"
#include "vistrace/scene.hpp"

namespace vistrace {

struct SamplerConfig {
  int spp = 16;        // samples per pixel
  int max_depth = 40;  // recursion bound
  uint64_t seed = 0;
};

struct RenderStats {
  std::atomic<long> nonfinite_clamped{0};  // non-finite path estimates zeroed

  RenderStats() = default;
  RenderStats(const RenderStats&) = delete;
};

// One path estimate: emitted radiance at every vertex plus next-event
// direct lighting at diffuse vertices, importance-sampled continuation
// until `max_depth` bounces or escape.
Rgb trace_path(const Scene& scene, const Ray& ray, int depth, int max_depth, Rng& rng,
               RenderStats* stats = nullptr);

RadianceImage render_serial(const Scene& scene, const CameraModel& camera,
                            const SamplerConfig& sampler, RenderStats* stats = nullptr);
RadianceImage render_parallel(const Scene& scene, const CameraModel& camera,
                              const SamplerConfig& sampler, RenderStats* stats = nullptr);

// Production entry point (parallel when OpenMP is available).
inline RadianceImage render(const Scene& scene, const CameraModel& camera,
                            const SamplerConfig& sampler, RenderStats* stats = nullptr) {
  return render_parallel(scene, camera, sampler, stats);
}

}  // namespace vistrace
