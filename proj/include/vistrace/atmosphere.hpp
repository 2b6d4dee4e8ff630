#pragma once

// Parametric Earth atmosphere: exponential density, the two-branch
// empirical refractive-index profile, concentric shells spaced at equal
// increments of cumulative density mass, optical depth / transmittance,
// and a single-scattering sky used as background radiance.
//
// Positions handed to segment queries are planet-centered meters. The sky
// observer sits on the local +z (zenith) axis.

#include <vector>

#include "vistrace/math.hpp"

namespace vistrace {

struct AtmosphereConfig {
  double sea_level_density = 1.225;  // kg/m^3
  double scale_height = 8500.0;      // m
  double thickness = 60000.0;        // m of modeled atmosphere
  int n_shells = 64;
  double turbidity = 2.0;  // >= 1; 1 disables the aerosol term
  Vec3 sun_direction{0, 0, 1};  // unit, pointing toward the sun
  double planet_radius = 6.371e6;  // m
  double observer_altitude = 1.0;  // m above sea level for sky queries

  // scattering parameters (config-overridable textbook values)
  Rgb rayleigh_beta{5.8e-6, 13.5e-6, 33.1e-6};  // m^-1 at sea level, RGB ~ 680/550/440 nm
  double mie_beta = 21e-6;            // m^-1 at sea level per unit excess turbidity
  double mie_g = 0.76;                // Henyey-Greenstein asymmetry
  double aerosol_scale_height = 1200.0;  // m
  double aerosol_ceiling = 10000.0;   // m; no Mie-active shells above this
  Rgb sun_irradiance{20, 20, 20};
  double water_vapor_density = 0.0;   // e term of the refractivity formula
};

// rho0 * exp(-h / H); negative altitudes clamp to sea level.
double air_density(const AtmosphereConfig& cfg, double h);

// Empirical refractivity (n - 1) 1e6 = 79 (P + 4800 e / T) / T, evaluated
// in imperial units (h in ft, T in Rankine, P in lb/ft^2):
//   troposphere (h < 12 km): T_F = 59 - 0.00356 h_ft,
//                            P = 2116 ((T_F + 459.7)/518.6)^5.256
//   above:                   T_F = -70, P = 473.1 exp(1.73 - 0.000048 h_ft)
// The two branches do not meet at 12 km; the jump is kept as printed.
double refractive_index(const AtmosphereConfig& cfg, double h);

struct ShellGrid {
  std::vector<double> radii;           // n_shells + 1 planet-centered boundaries
  std::vector<double> mean_density;    // per shell, relative to sea level
  std::vector<double> mean_aerosol;    // per shell, relative aerosol density
  std::vector<double> refractive;      // per shell, midpoint refractive index

  int shell_count() const { return static_cast<int>(mean_density.size()); }
  double top_radius() const { return radii.back(); }
  double bottom_radius() const { return radii.front(); }
};

// Boundaries at h_k = -H ln(1 - (k/n)(1 - exp(-thickness/H))): each shell
// holds the same integrated density mass, so spacing widens with altitude.
ShellGrid build_shells(const AtmosphereConfig& cfg);

class AtmosphereModel {
 public:
  explicit AtmosphereModel(const AtmosphereConfig& cfg)
      : cfg_(cfg), grid_(build_shells(cfg)) {}

  const AtmosphereConfig& config() const { return cfg_; }
  const ShellGrid& shells() const { return grid_; }

  // Optical depth per RGB band of the straight segment [a, b] (planet-
  // centered meters), accumulated shell by shell.
  Rgb optical_depth(const Vec3& a, const Vec3& b) const;

  Rgb transmittance(const Vec3& a, const Vec3& b) const;

  // Single-scattered sky radiance for a ground observer looking along
  // `view` (unit, world frame with +z the zenith). Zero below the horizon.
  Rgb sky_radiance(const Vec3& view) const;
  Rgb sky_radiance(const Vec3& view, const Vec3& sun_dir, double turbidity) const;

  // Diagnostic: bend a ray through the shell refractive-index profile
  // (Snell at each boundary crossing). Returns the exit direction and the
  // total deflection angle in radians. Not used by the renderer.
  Vec3 refract_through_shells(const Vec3& origin, const Vec3& direction,
                              double* total_deflection = nullptr) const;

 private:
  struct Span {
    double t0, t1;
    int shell;
  };
  // Sub-segments of [0, t_limit] along origin + t dir, tagged with shells.
  std::vector<Span> traverse(const Vec3& origin, const Vec3& dir, double t_limit) const;

  AtmosphereConfig cfg_;
  ShellGrid grid_;
};

}  // namespace vistrace
