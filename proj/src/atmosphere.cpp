#include "vistrace/atmosphere.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace vistrace {

double air_density(const AtmosphereConfig& cfg, double h) {
  if (h < 0.0) {
    std::fprintf(stderr, "warning: air_density: altitude %g m clamped to 0\n", h);
    h = 0.0;
  }
  return cfg.sea_level_density * std::exp(-h / cfg.scale_height);
}

double refractive_index(const AtmosphereConfig& cfg, double h) {
  if (h < 0.0) h = 0.0;
  const double h_ft = h / 0.3048;
  double t_rankine, pressure;
  if (h < 12000.0) {
    const double t_f = 59.0 - 0.00356 * h_ft;
    t_rankine = t_f + 459.7;
    pressure = 2116.0 * std::pow(t_rankine / 518.6, 5.256);
  } else {
    t_rankine = -70.0 + 459.7;
    pressure = 473.1 * std::exp(1.73 - 0.000048 * h_ft);
  }
  const double refractivity =
      79.0 * (pressure + 4800.0 * cfg.water_vapor_density / t_rankine) / t_rankine;
  return 1.0 + refractivity * 1e-6;
}

namespace {

// Altitude-average of exp(-h/H) over [h0, h1].
double mean_exponential(double h0, double h1, double scale) {
  if (h1 <= h0) return std::exp(-h0 / scale);
  return scale * (std::exp(-h0 / scale) - std::exp(-h1 / scale)) / (h1 - h0);
}

}  // namespace

ShellGrid build_shells(const AtmosphereConfig& cfg) {
  if (cfg.n_shells < 2) throw std::invalid_argument("build_shells: need n_shells >= 2");
  const int n = cfg.n_shells;
  const double mass_total = 1.0 - std::exp(-cfg.thickness / cfg.scale_height);

  ShellGrid grid;
  grid.radii.resize(n + 1);
  grid.mean_density.resize(n);
  grid.mean_aerosol.resize(n);
  grid.refractive.resize(n);

  std::vector<double> altitude(n + 1);
  altitude[0] = 0.0;
  for (int k = 1; k <= n; ++k)
    altitude[k] = -cfg.scale_height * std::log(1.0 - mass_total * k / n);
  altitude[n] = cfg.thickness;  // exact top despite rounding

  for (int k = 0; k <= n; ++k) grid.radii[k] = cfg.planet_radius + altitude[k];
  for (int k = 0; k < n; ++k) {
    const double h0 = altitude[k], h1 = altitude[k + 1];
    grid.mean_density[k] = mean_exponential(h0, h1, cfg.scale_height);
    // aerosols exist only below the ceiling
    const double a1 = std::min(h1, cfg.aerosol_ceiling);
    if (h0 >= cfg.aerosol_ceiling) {
      grid.mean_aerosol[k] = 0.0;
    } else {
      grid.mean_aerosol[k] =
          mean_exponential(h0, a1, cfg.aerosol_scale_height) * (a1 - h0) / (h1 - h0);
    }
    grid.refractive[k] = refractive_index(cfg, 0.5 * (h0 + h1));
  }
  return grid;
}

std::vector<AtmosphereModel::Span> AtmosphereModel::traverse(const Vec3& origin,
                                                             const Vec3& dir,
                                                             double t_limit) const {
  // Boundary crossings: |origin + t dir|^2 = r^2 for every shell radius.
  std::vector<double> cuts;
  cuts.reserve(2 * grid_.radii.size() + 2);
  cuts.push_back(0.0);
  cuts.push_back(t_limit);
  const double b = dot(origin, dir);
  const double c0 = dot(origin, origin);
  for (double r : grid_.radii) {
    const double disc = b * b - (c0 - r * r);
    if (disc <= 0.0) continue;
    const double sq = std::sqrt(disc);
    for (double t : {-b - sq, -b + sq})
      if (t > 0.0 && t < t_limit) cuts.push_back(t);
  }
  std::sort(cuts.begin(), cuts.end());

  std::vector<Span> spans;
  spans.reserve(cuts.size());
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double t0 = cuts[i], t1 = cuts[i + 1];
    if (t1 - t0 < 1e-9) continue;
    const double rmid = norm(origin + dir * (0.5 * (t0 + t1)));
    auto it = std::upper_bound(grid_.radii.begin(), grid_.radii.end(), rmid);
    const int idx = static_cast<int>(it - grid_.radii.begin()) - 1;
    if (idx < 0 || idx >= grid_.shell_count()) continue;  // outside the atmosphere
    spans.push_back({t0, t1, idx});
  }
  return spans;
}

Rgb AtmosphereModel::optical_depth(const Vec3& a, const Vec3& b) const {
  const Vec3 seg = b - a;
  const double len = norm(seg);
  if (len < 1e-12) return {0, 0, 0};
  const Vec3 dir = seg / len;
  const double mie_scale = cfg_.turbidity - 1.0;

  Rgb tau{0, 0, 0};
  for (const Span& span : traverse(a, dir, len)) {
    const double ds = span.t1 - span.t0;
    const double rho_r = grid_.mean_density[span.shell];
    const double rho_m = grid_.mean_aerosol[span.shell];
    tau += (cfg_.rayleigh_beta * rho_r + Rgb{1, 1, 1} * (cfg_.mie_beta * mie_scale * rho_m)) * ds;
  }
  return tau;
}

Rgb AtmosphereModel::transmittance(const Vec3& a, const Vec3& b) const {
  const Rgb tau = optical_depth(a, b);
  return {std::exp(-tau.x), std::exp(-tau.y), std::exp(-tau.z)};
}

Rgb AtmosphereModel::sky_radiance(const Vec3& view) const {
  return sky_radiance(view, cfg_.sun_direction, cfg_.turbidity);
}

Rgb AtmosphereModel::sky_radiance(const Vec3& view, const Vec3& sun_dir,
                                  double turbidity) const {
  const Vec3 up{0, 0, 1};
  if (dot(view, up) <= 0.0) return {0, 0, 0};

  const Vec3 observer = up * (cfg_.planet_radius + cfg_.observer_altitude);
  // distance to the top of the atmosphere along the view ray
  const double b = dot(observer, view);
  const double r_top = grid_.top_radius();
  const double disc = b * b - (dot(observer, observer) - r_top * r_top);
  if (disc <= 0.0) return {0, 0, 0};
  const double t_exit = -b + std::sqrt(disc);
  if (t_exit <= 0.0) return {0, 0, 0};

  const double cos_theta = std::clamp(dot(view, sun_dir), -1.0, 1.0);
  const double phase_r = 3.0 / (16.0 * kPi) * (1.0 + cos_theta * cos_theta);
  const double g = cfg_.mie_g;
  const double phase_m = (1.0 - g * g) /
                         (4.0 * kPi * std::pow(1.0 + g * g - 2.0 * g * cos_theta, 1.5));
  const double mie_scale = turbidity - 1.0;

  Rgb radiance{0, 0, 0};
  Rgb tau_cam{0, 0, 0};
  for (const Span& span : traverse(observer, view, t_exit)) {
    const double ds = span.t1 - span.t0;
    const double rho_r = grid_.mean_density[span.shell];
    const double rho_m = grid_.mean_aerosol[span.shell];
    const Rgb tau_step =
        cfg_.rayleigh_beta * rho_r + Rgb{1, 1, 1} * (cfg_.mie_beta * mie_scale * rho_m);

    const Vec3 sample = observer + view * (0.5 * (span.t0 + span.t1));
    // parallel sun rays: march from the sample toward the sun to space
    const double bs = dot(sample, sun_dir);
    const double disc_s = bs * bs - (dot(sample, sample) - r_top * r_top);
    if (disc_s <= 0.0) continue;
    const double t_sun = -bs + std::sqrt(disc_s);
    if (t_sun <= 0.0) continue;
    const Rgb tau_sun = optical_depth(sample, sample + sun_dir * t_sun);

    const Rgb att{std::exp(-(tau_cam.x + 0.5 * tau_step.x * ds) - tau_sun.x),
                  std::exp(-(tau_cam.y + 0.5 * tau_step.y * ds) - tau_sun.y),
                  std::exp(-(tau_cam.z + 0.5 * tau_step.z * ds) - tau_sun.z)};
    const Rgb scatter = cfg_.rayleigh_beta * (rho_r * phase_r) +
                        Rgb{1, 1, 1} * (cfg_.mie_beta * mie_scale * rho_m * phase_m);
    radiance += cfg_.sun_irradiance * scatter * att * ds;
    tau_cam += tau_step * ds;
  }
  return radiance;
}

Vec3 AtmosphereModel::refract_through_shells(const Vec3& origin, const Vec3& direction,
                                             double* total_deflection) const {
  Vec3 pos = origin;
  Vec3 dir = normalize(direction);
  double deflection = 0.0;

  // walk boundary crossings, bending at each index step
  for (int guard = 0; guard < 4 * grid_.shell_count() + 8; ++guard) {
    const double r_here = norm(pos);
    auto spans = traverse(pos, dir, 4.0 * grid_.top_radius());
    if (spans.empty()) break;
    const Span& span = spans.front();
    const Vec3 next = pos + dir * span.t1;
    const double r_next = norm(next);
    if (r_next >= grid_.top_radius() - 1e-6 || r_next <= grid_.bottom_radius() + 1e-6) {
      pos = next;
      break;
    }

    auto shell_of = [&](double r) {
      auto it = std::upper_bound(grid_.radii.begin(), grid_.radii.end(), r);
      return std::clamp(static_cast<int>(it - grid_.radii.begin()) - 1, 0,
                        grid_.shell_count() - 1);
    };
    const double n1 = grid_.refractive[span.shell];
    const Vec3 ahead = next + dir * 1e-3;
    const double n2 = grid_.refractive[shell_of(norm(ahead))];

    if (n1 != n2) {
      const Vec3 radial = next / r_next;
      const double cos_i = dot(dir, radial);
      const Vec3 tangent = dir - radial * cos_i;
      const double sin_i = norm(tangent);
      if (sin_i > 1e-15) {
        double sin_t = n1 * sin_i / n2;
        if (sin_t < 1.0) {
          const Vec3 t_hat = tangent / sin_i;
          const double cos_t = std::sqrt(1.0 - sin_t * sin_t);
          const Vec3 bent = t_hat * sin_t + radial * std::copysign(cos_t, cos_i);
          deflection += std::acos(std::clamp(dot(bent, dir), -1.0, 1.0));
          dir = bent;
        }
      }
    }
    pos = next + dir * 1e-6;
    (void)r_here;
  }
  if (total_deflection) *total_deflection = deflection;
  return dir;
}

}  // namespace vistrace
