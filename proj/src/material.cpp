#include "vistrace/material.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vistrace {

namespace {

double wrap01(double x) {
  const double w = x - std::floor(x);
  return w == 1.0 ? 0.0 : w;
}

}  // namespace

Rgb texture_lookup(const Texture& tex, double u, double v) {
  if (tex.width <= 0 || tex.height <= 0) return {0, 0, 0};
  // texel centers at (i + 0.5) / W; v = 1 maps to the top row
  const double x = wrap01(u) * tex.width - 0.5;
  const double y = (1.0 - wrap01(v)) * tex.height - 0.5;
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const double fx = x - x0;
  const double fy = y - y0;

  auto texel = [&](int xi, int yi) -> const Rgb& {
    xi %= tex.width;
    if (xi < 0) xi += tex.width;
    yi %= tex.height;
    if (yi < 0) yi += tex.height;
    return tex.at(xi, yi);
  };
  const Rgb c00 = texel(x0, y0), c10 = texel(x0 + 1, y0);
  const Rgb c01 = texel(x0, y0 + 1), c11 = texel(x0 + 1, y0 + 1);
  return c00 * ((1 - fx) * (1 - fy)) + c10 * (fx * (1 - fy)) + c01 * ((1 - fx) * fy) +
         c11 * (fx * fy);
}

namespace {

int next_ppm_token(std::istream& in) {
  // skips whitespace and '#' comments between header fields
  while (in) {
    int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  int value = -1;
  in >> value;
  return value;
}

}  // namespace

Texture load_texture_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_texture_ppm: cannot open " + path);
  std::string magic;
  in >> magic;
  if (magic != "P6" && magic != "P3")
    throw std::runtime_error("load_texture_ppm: " + path + " is not a P6/P3 PPM");

  Texture tex;
  tex.width = next_ppm_token(in);
  tex.height = next_ppm_token(in);
  const int maxval = next_ppm_token(in);
  if (tex.width <= 0 || tex.height <= 0 || maxval <= 0 || maxval > 255)
    throw std::runtime_error("load_texture_ppm: bad header in " + path);

  const size_t count = static_cast<size_t>(tex.width) * tex.height;
  tex.texels.resize(count);
  auto decode = [&](int raw) {
    return std::pow(static_cast<double>(raw) / maxval, 2.2);
  };
  if (magic == "P6") {
    in.get();  // single whitespace after maxval
    std::vector<unsigned char> raw(count * 3);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!in) throw std::runtime_error("load_texture_ppm: truncated data in " + path);
    for (size_t i = 0; i < count; ++i)
      tex.texels[i] = {decode(raw[3 * i]), decode(raw[3 * i + 1]), decode(raw[3 * i + 2])};
  } else {
    for (size_t i = 0; i < count; ++i) {
      int r = next_ppm_token(in), g = next_ppm_token(in), b = next_ppm_token(in);
      if (!in) throw std::runtime_error("load_texture_ppm: truncated data in " + path);
      tex.texels[i] = {decode(r), decode(g), decode(b)};
    }
  }
  return tex;
}

}  // namespace vistrace
