#pragma once

// Shared math substrate: 3-vectors, rays, rotation matrices, and the
// Cayley map between classical Rodrigues parameters and rotations.
// Double precision throughout; directions are unit-norm where stated.

#include <cmath>
#include <limits>
#include <stdexcept>

namespace vistrace {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTiny = 1e-12;

struct Vec3 {
  double x = 0, y = 0, z = 0;

  constexpr Vec3() = default;
  constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  constexpr Vec3 operator+(const Vec3& b) const { return {x + b.x, y + b.y, z + b.z}; }
  constexpr Vec3 operator-(const Vec3& b) const { return {x - b.x, y - b.y, z - b.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  // componentwise product, used for RGB throughput
  constexpr Vec3 operator*(const Vec3& b) const { return {x * b.x, y * b.y, z * b.z}; }

  Vec3& operator+=(const Vec3& b) { x += b.x; y += b.y; z += b.z; return *this; }
  Vec3& operator-=(const Vec3& b) { x -= b.x; y -= b.y; z -= b.z; return *this; }
  Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
  Vec3& operator*=(const Vec3& b) { x *= b.x; y *= b.y; z *= b.z; return *this; }

  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  bool operator==(const Vec3& b) const = default;
};

inline constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline constexpr double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline double norm2(const Vec3& a) { return dot(a, a); }

inline Vec3 normalize(const Vec3& a) {
  const double n = norm(a);
  if (n < kTiny) throw std::invalid_argument("normalize: near-zero vector");
  return a / n;
}

inline bool is_finite(const Vec3& a) {
  return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

inline double max_component(const Vec3& a) { return std::fmax(a.x, std::fmax(a.y, a.z)); }
inline double luminance(const Vec3& c) { return 0.2126 * c.x + 0.7152 * c.y + 0.0722 * c.z; }

// Linear RGB radiance rides on the same type.
using Rgb = Vec3;

struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit
  double t_min = 1e-4;
  double t_max = std::numeric_limits<double>::infinity();

  Vec3 at(double t) const { return origin + direction * t; }
};

// 6-DOF pose: CRP attitude q plus translation t. q = tan(theta/2) * axis,
// singular at 180 degree rotations.
struct Pose {
  Vec3 q;
  Vec3 t;
};

struct Mat3 {
  double m[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

  static constexpr Mat3 identity() { return {}; }

  double operator()(int r, int c) const { return m[r][c]; }
  double& operator()(int r, int c) { return m[r][c]; }

  Vec3 row(int r) const { return {m[r][0], m[r][1], m[r][2]}; }
  Vec3 col(int c) const { return {m[0][c], m[1][c], m[2][c]}; }

  Vec3 operator*(const Vec3& v) const {
    return {dot(row(0), v), dot(row(1), v), dot(row(2), v)};
  }

  Mat3 operator*(const Mat3& b) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        r.m[i][j] = m[i][0] * b.m[0][j] + m[i][1] * b.m[1][j] + m[i][2] * b.m[2][j];
    return r;
  }

  Mat3 transposed() const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r.m[i][j] = m[j][i];
    return r;
  }
};

// Rotation matrices get their own name so interfaces can state intent;
// orthonormality is established by construction, not re-checked per call.
using Rotation3 = Mat3;

inline Mat3 skew(const Vec3& q) {
  Mat3 s;
  s.m[0][0] = 0;     s.m[0][1] = -q.z;  s.m[0][2] = q.y;
  s.m[1][0] = q.z;   s.m[1][1] = 0;     s.m[1][2] = -q.x;
  s.m[2][0] = -q.y;  s.m[2][1] = q.x;   s.m[2][2] = 0;
  return s;
}

inline double det(const Mat3& a) {
  return a.m[0][0] * (a.m[1][1] * a.m[2][2] - a.m[1][2] * a.m[2][1])
       - a.m[0][1] * (a.m[1][0] * a.m[2][2] - a.m[1][2] * a.m[2][0])
       + a.m[0][2] * (a.m[1][0] * a.m[2][1] - a.m[1][1] * a.m[2][0]);
}

// Cayley transform R = (I + [q x])^-1 (I - [q x]), expanded in closed form:
// R = ((1 - q.q) I + 2 q q^T - 2 [q x]) / (1 + q.q).
inline Rotation3 crp_to_rotation(const Vec3& q) {
  if (!is_finite(q)) throw std::invalid_argument("crp_to_rotation: non-finite q");
  const double qq = dot(q, q);
  const double s = 1.0 / (1.0 + qq);
  Rotation3 r;
  r.m[0][0] = (1.0 + q.x * q.x - q.y * q.y - q.z * q.z) * s;
  r.m[0][1] = 2.0 * (q.x * q.y + q.z) * s;
  r.m[0][2] = 2.0 * (q.x * q.z - q.y) * s;
  r.m[1][0] = 2.0 * (q.y * q.x - q.z) * s;
  r.m[1][1] = (1.0 - q.x * q.x + q.y * q.y - q.z * q.z) * s;
  r.m[1][2] = 2.0 * (q.y * q.z + q.x) * s;
  r.m[2][0] = 2.0 * (q.z * q.x + q.y) * s;
  r.m[2][1] = 2.0 * (q.z * q.y - q.x) * s;
  r.m[2][2] = (1.0 - q.x * q.x - q.y * q.y + q.z * q.z) * s;
  return r;
}

// Inverse Cayley map, [q x] = (I - R)(I + R)^-1. Valid away from the
// 180 degree singularity (trace R = -1).
inline Vec3 rotation_to_crp(const Rotation3& r) {
  const double tr = r.m[0][0] + r.m[1][1] + r.m[2][2];
  const double denom = 1.0 + tr;
  if (std::abs(denom) < kTiny)
    throw std::invalid_argument("rotation_to_crp: 180 degree singularity");
  return Vec3{r.m[1][2] - r.m[2][1], r.m[2][0] - r.m[0][2], r.m[0][1] - r.m[1][0]} / denom;
}

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

}  // namespace vistrace
