#include "vistrace/image.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace vistrace {

void apply_exposure(RadianceImage& image, double stops) {
  const double scale = std::pow(2.0, stops);
  for (Rgb& p : image.pixels) p *= scale;
}

uint8_t encode_srgb_byte(double linear) {
  const double clamped = std::clamp(linear, 0.0, 1.0);
  return static_cast<uint8_t>(std::lround(255.0 * std::pow(clamped, 1.0 / 2.2)));
}

void write_ppm(const RadianceImage& image, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_ppm: cannot open " + path);
  out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  std::vector<uint8_t> row(static_cast<size_t>(image.width) * 3);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const Rgb& p = image.at(x, y);
      row[3 * x + 0] = encode_srgb_byte(p.x);
      row[3 * x + 1] = encode_srgb_byte(p.y);
      row[3 * x + 2] = encode_srgb_byte(p.z);
    }
    out.write(reinterpret_cast<const char*>(row.data()), row.size());
  }
}

void write_pgm(const std::vector<uint8_t>& gray, int width, int height,
               const std::string& path) {
  if (gray.size() != static_cast<size_t>(width) * height)
    throw std::invalid_argument("write_pgm: size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_pgm: cannot open " + path);
  out << "P5\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(gray.data()), gray.size());
}

namespace {

constexpr char kFimgMagic[4] = {'F', 'I', 'M', 'G'};

void put_u32(std::ostream& out, uint32_t v) {
  const uint8_t bytes[4] = {static_cast<uint8_t>(v), static_cast<uint8_t>(v >> 8),
                            static_cast<uint8_t>(v >> 16), static_cast<uint8_t>(v >> 24)};
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

uint32_t get_u32(std::istream& in) {
  uint8_t bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  return static_cast<uint32_t>(bytes[0]) | (static_cast<uint32_t>(bytes[1]) << 8) |
         (static_cast<uint32_t>(bytes[2]) << 16) | (static_cast<uint32_t>(bytes[3]) << 24);
}

}  // namespace

void write_fimg(const std::vector<float>& data, int width, int height, int channels,
                const std::string& path) {
  if (data.size() != static_cast<size_t>(width) * height * channels)
    throw std::invalid_argument("write_fimg: size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_fimg: cannot open " + path);
  out.write(kFimgMagic, 4);
  put_u32(out, static_cast<uint32_t>(width));
  put_u32(out, static_cast<uint32_t>(height));
  put_u32(out, static_cast<uint32_t>(channels));
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(float)));
}

std::vector<float> read_fimg(const std::string& path, int& width, int& height,
                             int& channels) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_fimg: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (std::memcmp(magic, kFimgMagic, 4) != 0)
    throw std::runtime_error("read_fimg: bad magic in " + path);
  width = static_cast<int>(get_u32(in));
  height = static_cast<int>(get_u32(in));
  channels = static_cast<int>(get_u32(in));
  std::vector<float> data(static_cast<size_t>(width) * height * channels);
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(data.size() * sizeof(float)));
  if (!in) throw std::runtime_error("read_fimg: truncated file " + path);
  return data;
}

}  // namespace vistrace
