#include "vistrace/mesh.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <set>
#include <sstream>

namespace vistrace {

namespace {

[[noreturn]] void fail(const std::string& name, int line, const std::string& what) {
  throw ParseError(name + ":" + std::to_string(line) + ": " + what);
}

void warn_unknown(const std::string& name, const std::string& keyword,
                  std::set<std::string>& warned) {
  if (warned.insert(keyword).second)
    std::fprintf(stderr, "warning: %s: skipping unknown record '%s'\n", name.c_str(),
                 keyword.c_str());
}

// OBJ indices are 1-based; negative values count back from the end.
int resolve_index(int raw, size_t count, const std::string& name, int line) {
  int idx = raw > 0 ? raw - 1 : static_cast<int>(count) + raw;
  if (idx < 0 || idx >= static_cast<int>(count))
    fail(name, line, "index " + std::to_string(raw) + " out of range (have " +
                         std::to_string(count) + ")");
  return idx;
}

FaceCorner parse_corner(const std::string& token, const TriangleMesh& mesh,
                        const std::string& name, int line) {
  FaceCorner corner;
  int v = 0, vt = 0, vn = 0;
  const char* s = token.c_str();
  char* end = nullptr;
  v = static_cast<int>(std::strtol(s, &end, 10));
  if (end == s) fail(name, line, "malformed face corner '" + token + "'");
  if (*end == '/') {
    s = end + 1;
    if (*s != '/') {
      vt = static_cast<int>(std::strtol(s, &end, 10));
      if (end == s) fail(name, line, "malformed face corner '" + token + "'");
      s = end;
    }
    if (*s == '/') {
      ++s;
      vn = static_cast<int>(std::strtol(s, &end, 10));
      if (end == s) fail(name, line, "malformed face corner '" + token + "'");
    }
  }
  corner.vertex = resolve_index(v, mesh.vertices.size(), name, line);
  if (vt != 0) corner.uv = resolve_index(vt, mesh.uvs.size() / 2, name, line);
  if (vn != 0) corner.normal = resolve_index(vn, mesh.normals.size(), name, line);
  return corner;
}

int find_or_add_material(TriangleMesh& mesh, const std::string& mat_name) {
  for (size_t i = 0; i < mesh.material_names.size(); ++i)
    if (mesh.material_names[i] == mat_name) return static_cast<int>(i);
  mesh.material_names.push_back(mat_name);
  mesh.materials.emplace_back();
  mesh.texture_paths.emplace_back();
  return static_cast<int>(mesh.materials.size()) - 1;
}

Rgb parse_rgb(std::istringstream& ss, const std::string& name, int line) {
  Rgb c;
  if (!(ss >> c.x)) fail(name, line, "expected color values");
  if (!(ss >> c.y)) { c.y = c.z = c.x; return c; }
  if (!(ss >> c.z)) fail(name, line, "expected 1 or 3 color values");
  return c;
}

}  // namespace

void load_mtl(std::istream& in, const std::string& name, TriangleMesh& mesh) {
  std::set<std::string> warned;
  std::string line_text;
  int line = 0;
  int current = -1;
  while (std::getline(in, line_text)) {
    ++line;
    std::istringstream ss(line_text);
    std::string keyword;
    if (!(ss >> keyword) || keyword[0] == '#') continue;

    if (keyword == "newmtl") {
      std::string mat_name;
      if (!(ss >> mat_name)) fail(name, line, "newmtl without a name");
      current = find_or_add_material(mesh, mat_name);
      continue;
    }
    if (current < 0) fail(name, line, "'" + keyword + "' before any newmtl");

    Material& m = mesh.materials[current];
    if (keyword == "Ka") {
      m.ka = parse_rgb(ss, name, line);
    } else if (keyword == "Kd") {
      m.kd = parse_rgb(ss, name, line);
      m.albedo = {std::min(m.kd.x, 0.999), std::min(m.kd.y, 0.999), std::min(m.kd.z, 0.999)};
      m.diffuse = m.kd.x > 0 || m.kd.y > 0 || m.kd.z > 0;
    } else if (keyword == "Ks") {
      m.ks = parse_rgb(ss, name, line);
    } else if (keyword == "Ke") {
      m.ke = parse_rgb(ss, name, line);
    } else if (keyword == "Ns") {
      if (!(ss >> m.shininess)) fail(name, line, "Ns expects a number");
    } else if (keyword == "Ni") {
      if (!(ss >> m.ior)) fail(name, line, "Ni expects a number");
      if (m.ior <= 0) fail(name, line, "Ni must be positive");
    } else if (keyword == "illum") {
      int mode = 0;
      if (!(ss >> mode)) fail(name, line, "illum expects a number");
      m.specular = mode >= 3;
      m.dielectric = mode == 4 || mode == 6 || mode == 7;
    } else if (keyword == "map_Kd") {
      std::string path;
      if (!(ss >> path)) fail(name, line, "map_Kd expects a path");
      mesh.texture_paths[current] = path;
    } else {
      warn_unknown(name, keyword, warned);
    }
  }
}

TriangleMesh load_obj(
    std::istream& in, const std::string& name,
    const std::function<std::unique_ptr<std::istream>(const std::string&)>& mtl_lookup) {
  TriangleMesh mesh;
  std::set<std::string> warned;
  std::string line_text;
  int line = 0;
  int current_material = -1;

  while (std::getline(in, line_text)) {
    ++line;
    std::istringstream ss(line_text);
    std::string keyword;
    if (!(ss >> keyword) || keyword[0] == '#') continue;

    if (keyword == "v") {
      Vec3 p;
      if (!(ss >> p.x >> p.y >> p.z)) fail(name, line, "malformed vertex");
      mesh.vertices.push_back(p);
    } else if (keyword == "vn") {
      Vec3 n;
      if (!(ss >> n.x >> n.y >> n.z)) fail(name, line, "malformed normal");
      mesh.normals.push_back(n);
    } else if (keyword == "vt") {
      double u, v;
      if (!(ss >> u >> v)) fail(name, line, "malformed texture coordinate");
      mesh.uvs.push_back(u);
      mesh.uvs.push_back(v);
    } else if (keyword == "f") {
      std::vector<FaceCorner> corners;
      std::string token;
      while (ss >> token) corners.push_back(parse_corner(token, mesh, name, line));
      if (corners.size() < 3) fail(name, line, "face needs at least 3 vertices");
      for (size_t i = 1; i + 1 < corners.size(); ++i) {
        Face face;
        face.corners[0] = corners[0];
        face.corners[1] = corners[i];
        face.corners[2] = corners[i + 1];
        face.material = current_material;
        mesh.faces.push_back(face);
      }
    } else if (keyword == "usemtl") {
      std::string mat_name;
      if (!(ss >> mat_name)) fail(name, line, "usemtl without a name");
      bool found = false;
      for (size_t i = 0; i < mesh.material_names.size(); ++i) {
        if (mesh.material_names[i] == mat_name) {
          current_material = static_cast<int>(i);
          found = true;
          break;
        }
      }
      if (!found) fail(name, line, "usemtl references unknown material '" + mat_name + "'");
    } else if (keyword == "mtllib") {
      std::string lib;
      if (!(ss >> lib)) fail(name, line, "mtllib without a path");
      if (!mtl_lookup) fail(name, line, "mtllib '" + lib + "' cannot be resolved here");
      auto lib_stream = mtl_lookup(lib);
      if (!lib_stream) fail(name, line, "referenced MTL file '" + lib + "' not found");
      load_mtl(*lib_stream, lib, mesh);
    } else if (keyword == "o" || keyword == "g" || keyword == "s") {
      // grouping and smoothing records carry no geometry
    } else {
      warn_unknown(name, keyword, warned);
    }
  }
  return mesh;
}

TriangleMesh load_obj_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open OBJ file");
  const auto dir = std::filesystem::path(path).parent_path();
  auto lookup = [&dir](const std::string& lib) -> std::unique_ptr<std::istream> {
    auto stream = std::make_unique<std::ifstream>(dir / lib);
    if (!*stream) return nullptr;
    return stream;
  };
  return load_obj(in, path, lookup);
}

void serialize_obj(const TriangleMesh& mesh, std::ostream& out) {
  char buf[128];
  for (const Vec3& p : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", p.x, p.y, p.z);
    out << buf;
  }
  for (size_t i = 0; i + 1 < mesh.uvs.size(); i += 2) {
    std::snprintf(buf, sizeof buf, "vt %.17g %.17g\n", mesh.uvs[i], mesh.uvs[i + 1]);
    out << buf;
  }
  for (const Vec3& n : mesh.normals) {
    std::snprintf(buf, sizeof buf, "vn %.17g %.17g %.17g\n", n.x, n.y, n.z);
    out << buf;
  }
  for (const Face& f : mesh.faces) {
    out << 'f';
    for (const FaceCorner& c : f.corners) {
      out << ' ' << c.vertex + 1;
      if (c.uv >= 0 || c.normal >= 0) {
        out << '/';
        if (c.uv >= 0) out << c.uv + 1;
        if (c.normal >= 0) out << '/' << c.normal + 1;
      }
    }
    out << '\n';
  }
}

}  // namespace vistrace
