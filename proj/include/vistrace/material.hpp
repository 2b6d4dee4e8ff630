#pragma once

// Surface appearance: Phong coefficients for local lighting, albedo and
// flags for path-traced transport, plus light sources and textures.

#include <string>
#include <vector>

#include "vistrace/math.hpp"

namespace vistrace {

struct Material {
  Rgb ke{0, 0, 0};      // emissive
  Rgb ka{0, 0, 0};      // ambient
  Rgb kd{0.8, 0.8, 0.8};// diffuse
  Rgb ks{0, 0, 0};      // specular
  double shininess = 0; // Phong exponent n
  Rgb albedo{0.8, 0.8, 0.8};  // diffuse reflectance, each channel < 1
  double ior = 1.5;     // index of refraction n_t
  bool diffuse = true;
  bool specular = false;    // perfect mirror branch
  bool dielectric = false;  // refractive branch

  bool emissive() const { return ke.x > 0 || ke.y > 0 || ke.z > 0; }
};

enum class LightKind { point, directional };

struct LightSource {
  LightKind kind = LightKind::point;
  Vec3 position;   // point lights
  Vec3 direction;  // unit, direction the light travels (directional)
  Rgb intensity{1, 1, 1};
};

// Row-major texel grid in linear RGB.
struct Texture {
  int width = 0, height = 0;
  std::vector<Rgb> texels;

  const Rgb& at(int x, int y) const { return texels[static_cast<size_t>(y) * width + x]; }
};

// Bilinear lookup with wrap addressing on both axes; texel centers sit at
// ((i + 0.5)/W, (j + 0.5)/H).
Rgb texture_lookup(const Texture& tex, double u, double v);

// PPM (P6 or P3) texture reader; values are linearized from gamma 2.2.
Texture load_texture_ppm(const std::string& path);

}  // namespace vistrace
