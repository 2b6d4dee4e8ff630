#pragma once

// Local illumination: Phong lighting, mirror reflection, Snell refraction,
// Schlick's Fresnel approximation, and shadow queries.
//
// Direction convention: V points from the eye toward the surface in
// reflect/refract (matching the refraction basis construction); L points
// from the surface toward the light in the Phong terms.

#include <optional>

#include "vistrace/material.hpp"
#include "vistrace/math.hpp"

namespace vistrace {

struct Scene;

// I = ke*IE + ka*IA + kd*ID*max(0, L.N) + ks*IS*max(0, R.V)^n, summed over
// the one given light. `view` points from the surface toward the eye.
Rgb phong_radiance(const Vec3& point, const Vec3& normal, const Vec3& view,
                   const LightSource& light, const Material& material,
                   double ambient = 0.0, double emissive_scale = 1.0);

// R = V - 2 (V.N) N, with V toward the surface. Unit in, unit out.
Vec3 reflect_dir(const Vec3& v, const Vec3& n);

// Snell bending from index n to n_t; std::nullopt signals total internal
// reflection. V toward the surface, N against it (cos(theta) = -V.N >= 0).
std::optional<Vec3> refract_dir(const Vec3& v, const Vec3& n, double n_from, double n_to);

// Schlick reflectance R0 + (1 - R0)(1 - cos)^5 with R0 = ((nt-1)/(nt+1))^2.
double schlick_reflectance(double cos_theta, double n_t);

// Light direction L (surface toward light) and the parametric distance to
// the light along it (infinity for directional sources).
void light_towards(const LightSource& light, const Vec3& point, Vec3& l, double& distance);

// Incident irradiance at `point` from the light, before the cosine factor:
// intensity / r^2 for point lights, intensity for directional ones.
Rgb light_irradiance(const LightSource& light, const Vec3& point);

// true iff some primitive blocks the segment from `point` toward the light.
bool shadow_test(const Scene& scene, const Vec3& point, const LightSource& light);

}  // namespace vistrace
