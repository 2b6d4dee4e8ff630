#include "vistrace/scene_config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "vistrace/mesh.hpp"
#include "vistrace/sampler.hpp"

namespace vistrace {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw ConfigError("scene: " + what); }

void check_keys(const json& node, const std::set<std::string>& allowed,
                const std::string& where) {
  for (const auto& item : node.items())
    if (!allowed.count(item.key()))
      bad("unknown key '" + item.key() + "' in " + where);
}

Vec3 get_vec3(const json& node, const std::string& where) {
  if (!node.is_array() || node.size() != 3) bad(where + " must be an array of 3 numbers");
  return {node[0].get<double>(), node[1].get<double>(), node[2].get<double>()};
}

Vec3 get_vec3_field(const json& parent, const std::string& key, const Vec3& fallback,
                    const std::string& where) {
  if (!parent.contains(key)) return fallback;
  return get_vec3(parent[key], where + "." + key);
}

double get_number(const json& parent, const std::string& key, double fallback) {
  return parent.contains(key) ? parent[key].get<double>() : fallback;
}

Material parse_material(const json& node, const std::string& where) {
  check_keys(node, {"ke", "ka", "kd", "ks", "shininess", "ior", "type"}, where);
  Material m;
  m.ke = get_vec3_field(node, "ke", {0, 0, 0}, where);
  m.ka = get_vec3_field(node, "ka", {0, 0, 0}, where);
  m.kd = get_vec3_field(node, "kd", {0.8, 0.8, 0.8}, where);
  m.ks = get_vec3_field(node, "ks", {0, 0, 0}, where);
  m.shininess = get_number(node, "shininess", 0.0);
  m.ior = get_number(node, "ior", 1.5);
  m.albedo = {std::min(m.kd.x, 0.999), std::min(m.kd.y, 0.999), std::min(m.kd.z, 0.999)};
  m.diffuse = true;
  if (node.contains("type")) {
    const std::string type = node["type"].get<std::string>();
    if (type == "diffuse") {
      m.diffuse = true;
    } else if (type == "mirror") {
      m.diffuse = false;
      m.specular = true;
    } else if (type == "dielectric") {
      m.diffuse = false;
      m.dielectric = true;
    } else if (type == "emissive") {
      m.diffuse = false;
    } else {
      bad(where + ".type: unknown material type '" + type + "'");
    }
  }
  if (m.shininess < 0) bad(where + ".shininess must be >= 0");
  if (m.ior <= 0) bad(where + ".ior must be positive");
  return m;
}

void require_file(const std::string& path, const std::string& what) {
  if (!std::filesystem::exists(path)) bad(what + " file not found: " + path);
}

uint64_t digest_bytes(const std::string& text) {
  uint64_t h = 0x243F6A8885A308D3ull;
  for (unsigned char c : text) h = hash_combine(h, c);
  return h;
}

}  // namespace

SceneConfig parse_scene(const std::string& text, const std::string& base_dir,
                        bool check_files) {
  json root;
  try {
    root = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    bad(std::string("not valid JSON: ") + e.what());
  }
  check_keys(root, {"camera", "lights", "objects", "atmosphere", "sampler", "background",
                    "ambient"},
             "top level");

  SceneConfig cfg;
  cfg.base_dir = base_dir;

  if (!root.contains("camera")) bad("missing required 'camera' block");
  {
    const json& cam = root["camera"];
    check_keys(cam,
               {"kind", "origin", "target", "up", "fov_deg", "resolution", "aperture",
                "focus_distance", "exposure_stops"},
               "camera");
    if (!cam.contains("origin") || !cam.contains("target"))
      bad("camera needs 'origin' and 'target'");
    cfg.camera_origin = get_vec3(cam["origin"], "camera.origin");
    cfg.camera_target = get_vec3(cam["target"], "camera.target");
    cfg.camera_up = get_vec3_field(cam, "up", {0, 1, 0}, "camera");
    if (norm(cross(cfg.camera_up, cfg.camera_origin - cfg.camera_target)) < kTiny)
      cfg.camera_up = {1, 0, 0};  // fallback when the default up is degenerate
    const double fov_deg = get_number(cam, "fov_deg", 45.0);
    if (fov_deg <= 0.0 || fov_deg >= 180.0)
      bad("camera.fov_deg must lie in (0, 180), got " + std::to_string(fov_deg));
    cfg.fov = deg_to_rad(fov_deg);
    if (cam.contains("resolution")) {
      const json& res = cam["resolution"];
      if (!res.is_array() || res.size() != 2) bad("camera.resolution must be [W, H]");
      cfg.width = res[0].get<int>();
      cfg.height = res[1].get<int>();
      if (cfg.width < 1 || cfg.height < 1) bad("camera.resolution must be at least 1x1");
    }
    cfg.aperture = get_number(cam, "aperture", 0.0);
    if (cfg.aperture < 0) bad("camera.aperture must be >= 0");
    cfg.focus_distance = get_number(cam, "focus_distance", -1.0);
    cfg.exposure_stops = get_number(cam, "exposure_stops", 0.0);
    if (cam.contains("kind")) {
      const std::string kind = cam["kind"].get<std::string>();
      if (kind == "pinhole") cfg.camera_kind = CameraKind::pinhole;
      else if (kind == "thin_lens") cfg.camera_kind = CameraKind::thin_lens;
      else bad("camera.kind must be 'pinhole' or 'thin_lens'");
    } else if (cfg.aperture > 0.0) {
      cfg.camera_kind = CameraKind::thin_lens;
    }
  }

  if (root.contains("sampler")) {
    const json& s = root["sampler"];
    check_keys(s, {"spp", "max_depth", "seed"}, "sampler");
    cfg.sampler.spp = static_cast<int>(get_number(s, "spp", 16));
    cfg.sampler.max_depth = static_cast<int>(get_number(s, "max_depth", 40));
    cfg.sampler.seed = static_cast<uint64_t>(get_number(s, "seed", 0));
    if (cfg.sampler.spp < 1) bad("sampler.spp must be >= 1");
    if (cfg.sampler.max_depth < 0) bad("sampler.max_depth must be >= 0");
  }

  if (root.contains("background"))
    cfg.background = get_vec3(root["background"], "background");
  cfg.ambient = get_number(root, "ambient", 0.0);

  if (root.contains("lights")) {
    for (size_t i = 0; i < root["lights"].size(); ++i) {
      const json& l = root["lights"][i];
      const std::string where = "lights[" + std::to_string(i) + "]";
      check_keys(l, {"kind", "position", "direction", "intensity"}, where);
      LightSource light;
      const std::string kind = l.contains("kind") ? l["kind"].get<std::string>() : "point";
      if (kind == "point") {
        light.kind = LightKind::point;
        if (!l.contains("position")) bad(where + ": point light needs 'position'");
        light.position = get_vec3(l["position"], where + ".position");
      } else if (kind == "directional") {
        light.kind = LightKind::directional;
        if (!l.contains("direction")) bad(where + ": directional light needs 'direction'");
        light.direction = normalize(get_vec3(l["direction"], where + ".direction"));
      } else {
        bad(where + ".kind must be 'point' or 'directional'");
      }
      light.intensity = get_vec3_field(l, "intensity", {1, 1, 1}, where);
      cfg.lights.push_back(light);
    }
  }

  if (root.contains("objects")) {
    for (size_t i = 0; i < root["objects"].size(); ++i) {
      const json& o = root["objects"][i];
      const std::string where = "objects[" + std::to_string(i) + "]";
      if (!o.contains("kind")) bad(where + " needs a 'kind'");
      const std::string kind = o["kind"].get<std::string>();
      if (kind == "sphere") {
        check_keys(o, {"kind", "center", "radius", "material", "texture"}, where);
        SphereSpec spec;
        spec.sphere.center = get_vec3_field(o, "center", {0, 0, 0}, where);
        spec.sphere.radius = get_number(o, "radius", 1.0);
        if (spec.sphere.radius <= 0) bad(where + ".radius must be positive");
        if (o.contains("material"))
          spec.material = parse_material(o["material"], where + ".material");
        if (o.contains("texture")) {
          spec.texture = o["texture"].get<std::string>();
          if (check_files)
            require_file((std::filesystem::path(base_dir) / spec.texture).string(),
                         where + " texture");
        }
        cfg.spheres.push_back(spec);
      } else if (kind == "mesh") {
        check_keys(o, {"kind", "obj", "translate", "scale", "rotation_crp", "material"},
                   where);
        MeshSpec spec;
        if (!o.contains("obj")) bad(where + " needs an 'obj' path");
        spec.obj_path = o["obj"].get<std::string>();
        if (check_files)
          require_file((std::filesystem::path(base_dir) / spec.obj_path).string(),
                       where + " mesh");
        spec.translate = get_vec3_field(o, "translate", {0, 0, 0}, where);
        spec.scale = get_number(o, "scale", 1.0);
        if (spec.scale == 0) bad(where + ".scale must be nonzero");
        spec.rotation_crp = get_vec3_field(o, "rotation_crp", {0, 0, 0}, where);
        if (o.contains("material"))
          spec.material_override = parse_material(o["material"], where + ".material");
        cfg.meshes.push_back(spec);
      } else {
        bad(where + ".kind must be 'sphere' or 'mesh', got '" + kind + "'");
      }
    }
  }

  if (root.contains("atmosphere")) {
    const json& a = root["atmosphere"];
    check_keys(a,
               {"enabled", "turbidity", "thickness", "scale_height", "n_shells",
                "sun_azimuth_deg", "sun_elevation_deg", "observer_altitude",
                "sun_irradiance", "planet_radius"},
               "atmosphere");
    cfg.atmosphere_enabled = a.contains("enabled") ? a["enabled"].get<bool>() : true;
    cfg.atmosphere.turbidity = get_number(a, "turbidity", 2.0);
    if (cfg.atmosphere.turbidity < 1.0) bad("atmosphere.turbidity must be >= 1");
    cfg.atmosphere.thickness = get_number(a, "thickness", 60000.0);
    cfg.atmosphere.scale_height = get_number(a, "scale_height", 8500.0);
    cfg.atmosphere.n_shells = static_cast<int>(get_number(a, "n_shells", 64));
    cfg.atmosphere.observer_altitude = get_number(a, "observer_altitude", 1.0);
    cfg.atmosphere.planet_radius = get_number(a, "planet_radius", 6.371e6);
    cfg.atmosphere.sun_irradiance =
        get_vec3_field(a, "sun_irradiance", {20, 20, 20}, "atmosphere");
    const double az = deg_to_rad(get_number(a, "sun_azimuth_deg", 0.0));
    const double el = deg_to_rad(get_number(a, "sun_elevation_deg", 30.0));
    cfg.atmosphere.sun_direction = {std::cos(el) * std::cos(az),
                                    std::cos(el) * std::sin(az), std::sin(el)};
  }

  // identical objects + atmosphere blocks produce identical digests, which
  // is how the stereo command validates that two scene files share a world
  json shared = json::object();
  if (root.contains("objects")) shared["objects"] = root["objects"];
  if (root.contains("atmosphere")) shared["atmosphere"] = root["atmosphere"];
  if (root.contains("lights")) shared["lights"] = root["lights"];
  cfg.objects_digest = digest_bytes(shared.dump());

  return cfg;
}

SceneConfig parse_scene_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scene file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scene(buffer.str(), std::filesystem::path(path).parent_path().string(),
                     true);
}

CameraModel build_camera(const SceneConfig& cfg) {
  CameraModel cam = make_camera(cfg.camera_origin, cfg.camera_target, cfg.camera_up,
                                cfg.fov, cfg.width, cfg.height);
  cam.kind = cfg.camera_kind;
  cam.aperture = cfg.aperture;
  if (cfg.focus_distance > 0) cam.focus_distance = cfg.focus_distance;
  return cam;
}

Scene build_scene(const SceneConfig& cfg) {
  Scene scene;
  scene.background = cfg.background;
  scene.ambient = cfg.ambient;
  scene.lights = cfg.lights;
  if (cfg.atmosphere_enabled)
    scene.sky = std::make_shared<AtmosphereModel>(cfg.atmosphere);

  const std::filesystem::path base(cfg.base_dir);

  for (const SphereSpec& spec : cfg.spheres) {
    scene.materials.push_back(spec.material);
    int texture = -1;
    if (!spec.texture.empty()) {
      scene.textures.push_back(load_texture_ppm((base / spec.texture).string()));
      texture = static_cast<int>(scene.textures.size()) - 1;
    }
    scene.add_sphere(spec.sphere, static_cast<int>(scene.materials.size()) - 1, texture);
  }

  for (const MeshSpec& spec : cfg.meshes) {
    const TriangleMesh mesh = load_obj_file((base / spec.obj_path).string());

    // map the mesh's material table (or the override) into the scene table
    const int material_base = static_cast<int>(scene.materials.size());
    int override_id = -1;
    std::vector<int> texture_of(mesh.materials.size(), -1);
    if (spec.material_override) {
      scene.materials.push_back(*spec.material_override);
      override_id = material_base;
    } else {
      for (size_t m = 0; m < mesh.materials.size(); ++m) {
        scene.materials.push_back(mesh.materials[m]);
        if (!mesh.texture_paths[m].empty()) {
          scene.textures.push_back(
              load_texture_ppm((base / mesh.texture_paths[m]).string()));
          texture_of[m] = static_cast<int>(scene.textures.size()) - 1;
        }
      }
    }
    int fallback_id = -1;  // lazily added default material for untagged faces

    const Rotation3 rot = crp_to_rotation(spec.rotation_crp);
    auto transform = [&](const Vec3& p) { return rot * (p * spec.scale) + spec.translate; };
    auto transform_dir = [&](const Vec3& n) { return rot * n; };

    for (const Face& face : mesh.faces) {
      Triangle tri;
      tri.a = transform(mesh.vertices[face.corners[0].vertex]);
      tri.b = transform(mesh.vertices[face.corners[1].vertex]);
      tri.c = transform(mesh.vertices[face.corners[2].vertex]);
      if (face.corners[0].normal >= 0 && face.corners[1].normal >= 0 &&
          face.corners[2].normal >= 0) {
        tri.na = normalize(transform_dir(mesh.normals[face.corners[0].normal]));
        tri.nb = normalize(transform_dir(mesh.normals[face.corners[1].normal]));
        tri.nc = normalize(transform_dir(mesh.normals[face.corners[2].normal]));
        tri.has_normals = true;
      }
      if (face.corners[0].uv >= 0 && face.corners[1].uv >= 0 && face.corners[2].uv >= 0) {
        tri.ua = mesh.uvs[2 * face.corners[0].uv];
        tri.va = mesh.uvs[2 * face.corners[0].uv + 1];
        tri.ub = mesh.uvs[2 * face.corners[1].uv];
        tri.vb = mesh.uvs[2 * face.corners[1].uv + 1];
        tri.uc = mesh.uvs[2 * face.corners[2].uv];
        tri.vc = mesh.uvs[2 * face.corners[2].uv + 1];
        tri.has_uv = true;
      }

      int material;
      int texture = -1;
      if (override_id >= 0) {
        material = override_id;
      } else if (face.material >= 0) {
        material = material_base + face.material;
        texture = texture_of[face.material];
      } else {
        if (fallback_id < 0) {
          scene.materials.emplace_back();
          fallback_id = static_cast<int>(scene.materials.size()) - 1;
        }
        material = fallback_id;
      }
      scene.add_triangle(tri, material, texture);
    }
  }

  scene.finalize();
  return scene;
}

}  // namespace vistrace
