#pragma once

// Counter-based random streams. Every pixel sample owns an independent
// generator keyed on (seed, pixel index, sample index), so rendered output
// is identical no matter how work is scheduled across threads.

#include <cstdint>

#include "vistrace/math.hpp"

namespace vistrace {

inline uint64_t splitmix64(uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline uint64_t hash_combine(uint64_t a, uint64_t b) {
  uint64_t s = a;
  uint64_t h = splitmix64(s);
  s = h ^ (b + 0x9E3779B97F4A7C15ull);
  return splitmix64(s);
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) { (void)splitmix64(state_); }

  // Stream for one pixel sample.
  Rng(uint64_t seed, uint64_t pixel_index, uint64_t sample_index)
      : state_(hash_combine(hash_combine(seed, pixel_index), sample_index)) {}

  uint64_t next_u64() { return splitmix64(state_); }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // standard normal via Box-Muller (one value per call; the twin is dropped
  // to keep the stream position independent of usage pattern)
  double gaussian() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

 private:
  uint64_t state_;
};

// Orthonormal basis around a unit vector n (Duff et al. branchless form).
inline void basis_from_normal(const Vec3& n, Vec3& t, Vec3& b) {
  const double sign = std::copysign(1.0, n.z);
  const double a = -1.0 / (sign + n.z);
  const double c = n.x * n.y * a;
  t = {1.0 + sign * n.x * n.x * a, sign * c, -sign * n.x};
  b = {c, sign + n.y * n.y * a, -n.y};
}

// Cosine-weighted hemisphere direction about n; pdf = cos(theta) / pi.
inline Vec3 sample_cosine_hemisphere(const Vec3& n, Rng& rng) {
  const double u1 = rng.uniform();
  const double u2 = rng.uniform();
  const double r = std::sqrt(u1);
  const double phi = 2.0 * kPi * u2;
  const double zl = std::sqrt(std::fmax(0.0, 1.0 - u1));
  Vec3 t, b;
  basis_from_normal(n, t, b);
  return t * (r * std::cos(phi)) + b * (r * std::sin(phi)) + n * zl;
}

// Power-cosine lobe about the mirror direction r; pdf = (n+1)/(2 pi) cos^n(alpha).
inline Vec3 sample_phong_lobe(const Vec3& r, double exponent, Rng& rng) {
  const double u1 = rng.uniform();
  const double u2 = rng.uniform();
  const double cos_a = std::pow(u1, 1.0 / (exponent + 1.0));
  const double sin_a = std::sqrt(std::fmax(0.0, 1.0 - cos_a * cos_a));
  const double phi = 2.0 * kPi * u2;
  Vec3 t, b;
  basis_from_normal(r, t, b);
  return t * (sin_a * std::cos(phi)) + b * (sin_a * std::sin(phi)) + r * cos_a;
}

// Uniform point on the unit disk (polar mapping; radius 0 at u1 = 0).
inline void sample_disk(Rng& rng, double& dx, double& dy) {
  const double r = std::sqrt(rng.uniform());
  const double phi = 2.0 * kPi * rng.uniform();
  dx = r * std::cos(phi);
  dy = r * std::sin(phi);
}

}  // namespace vistrace
