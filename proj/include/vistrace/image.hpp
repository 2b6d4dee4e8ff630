#pragma once

// Image buffers and file formats: binary PPM (P6, maxval 255, gamma 2.2)
// for display output, PGM previews, and the flat float image format
// "FIMG" (magic, uint32 W/H/C little-endian, float32 data row-major).

#include <cstdint>
#include <string>
#include <vector>

#include "vistrace/math.hpp"

namespace vistrace {

struct RadianceImage {
  int width = 0, height = 0;
  std::vector<Rgb> pixels;  // linear radiance, row-major
  // per-pixel first-hit records (filled by the renderer)
  std::vector<double> depth;       // ray parameter t, +inf on miss
  std::vector<Vec3> hit_points;
  std::vector<int> hit_primitive;  // -1 on miss

  RadianceImage() = default;
  RadianceImage(int w, int h)
      : width(w), height(h),
        pixels(static_cast<size_t>(w) * h),
        depth(static_cast<size_t>(w) * h, std::numeric_limits<double>::infinity()),
        hit_points(static_cast<size_t>(w) * h),
        hit_primitive(static_cast<size_t>(w) * h, -1) {}

  size_t index(int x, int y) const { return static_cast<size_t>(y) * width + x; }
  Rgb& at(int x, int y) { return pixels[index(x, y)]; }
  const Rgb& at(int x, int y) const { return pixels[index(x, y)]; }
};

// Scales linear radiance by 2^stops (applied before display encoding).
void apply_exposure(RadianceImage& image, double stops);

// Gamma 2.2 encode and quantize one channel to 8 bits.
uint8_t encode_srgb_byte(double linear);

void write_ppm(const RadianceImage& image, const std::string& path);
// Writes gray bytes as-is (callers choose the mapping).
void write_pgm(const std::vector<uint8_t>& gray, int width, int height,
               const std::string& path);

// FIMG float images; channels = 3 stores RGB interleaved, 1 a scalar field.
void write_fimg(const std::vector<float>& data, int width, int height, int channels,
                const std::string& path);
std::vector<float> read_fimg(const std::string& path, int& width, int& height,
                             int& channels);

}  // namespace vistrace
