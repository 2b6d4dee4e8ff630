#pragma once

// Wavefront OBJ/MTL ingestion. Faces with more than three vertices are
// fan-triangulated; per-corner vt/vn indices are bound when present.
// Unknown record types are skipped with a warning.

#include <functional>
#include <istream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "vistrace/material.hpp"
#include "vistrace/math.hpp"

namespace vistrace {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FaceCorner {
  int vertex = -1;   // indices into the arrays below, resolved and 0-based
  int uv = -1;
  int normal = -1;
};

struct Face {
  FaceCorner corners[3];
  int material = -1;  // index into materials, -1 when no usemtl is active
};

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Vec3> normals;
  std::vector<double> uvs;  // interleaved (u, v)
  std::vector<Face> faces;
  std::vector<Material> materials;
  std::vector<std::string> material_names;
  std::vector<std::string> texture_paths;  // per material, empty when untextured
};

// `name` appears in diagnostics; `mtl_lookup` resolves "mtllib" references
// to an input stream (defaults to opening relative to the OBJ's directory
// in the path-based overload).
TriangleMesh load_obj(std::istream& in, const std::string& name,
                      const std::function<std::unique_ptr<std::istream>(const std::string&)>&
                          mtl_lookup = {});

TriangleMesh load_obj_file(const std::string& path);

void load_mtl(std::istream& in, const std::string& name, TriangleMesh& mesh);

// Writes v/vt/vn/f records; parse(serialize(mesh)) preserves vertex and
// face counts exactly.
void serialize_obj(const TriangleMesh& mesh, std::ostream& out);

}  // namespace vistrace
