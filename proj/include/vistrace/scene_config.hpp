#pragma once

// Scene description files (JSON). parse_scene validates the tree (unknown
// keys are errors, referenced files must exist), fills defaults, and leaves
// a config that build_scene / build_camera turn into render inputs.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vistrace/atmosphere.hpp"
#include "vistrace/render.hpp"
#include "vistrace/scene.hpp"

namespace vistrace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SphereSpec {
  Sphere sphere;
  Material material;
  std::string texture;  // PPM path, optional
};

struct MeshSpec {
  std::string obj_path;
  Vec3 translate{0, 0, 0};
  double scale = 1.0;
  Vec3 rotation_crp{0, 0, 0};
  std::optional<Material> material_override;
};

struct SceneConfig {
  // camera block
  CameraKind camera_kind = CameraKind::pinhole;
  Vec3 camera_origin{0, 0, 5};
  Vec3 camera_target{0, 0, 0};
  Vec3 camera_up{0, 1, 0};
  double fov = deg_to_rad(45.0);
  int width = 256, height = 256;
  double aperture = 0.0;
  double focus_distance = -1.0;  // < 0 means |target - origin|
  double exposure_stops = 0.0;

  SamplerConfig sampler;  // spp 16, depth 40, seed 0 defaults

  Rgb background{0, 0, 0};
  double ambient = 0.0;

  bool atmosphere_enabled = false;
  AtmosphereConfig atmosphere;

  std::vector<SphereSpec> spheres;
  std::vector<MeshSpec> meshes;
  std::vector<LightSource> lights;

  std::string base_dir;        // directory referenced paths resolve against
  uint64_t objects_digest = 0; // hash over objects + atmosphere blocks
};

// `check_files` verifies referenced meshes/textures exist (the CLI path);
// tests that parse from strings can turn it off.
SceneConfig parse_scene(const std::string& text, const std::string& base_dir = ".",
                        bool check_files = true);
SceneConfig parse_scene_file(const std::string& path);

CameraModel build_camera(const SceneConfig& cfg);
Scene build_scene(const SceneConfig& cfg);

}  // namespace vistrace
