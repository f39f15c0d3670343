#include "r2l/sim.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "r2l/fft.hpp"
#include "r2l/rng.hpp"

namespace r2l {

void SimConfig::validate() const {
  if (max_range <= 0.0) throw std::invalid_argument("SimConfig: max_range > 0");
  if (n_range_bins <= 0 || n_radar_az_bins <= 0 || n_lidar_az_bins <= 0)
    throw std::invalid_argument("SimConfig: bin counts must be positive");
  if (n_lidar_az_bins % n_radar_az_bins != 0)
    throw std::invalid_argument("SimConfig: n_lidar_az_bins must be a multiple of n_radar_az_bins");
  if (!is_pow2(static_cast<size_t>(n_fast_time)))
    throw std::invalid_argument("SimConfig: n_fast_time must be a power of two");
  if (!is_pow2(static_cast<size_t>(n_radar_az_bins)) || n_radar_az_bins < n_antennas)
    throw std::invalid_argument("SimConfig: n_radar_az_bins must be a power of two >= n_antennas");
  if (n_range_bins > n_fast_time / 2)
    throw std::invalid_argument("SimConfig: n_range_bins must be <= n_fast_time/2");
  if (n_antennas < 2) throw std::invalid_argument("SimConfig: n_antennas >= 2");
  if (wavelength <= 0.0 || noise_sigma < 0.0 || wall_sample_spacing <= 0.0)
    throw std::invalid_argument("SimConfig: bad signal parameters");
  if (ghost_order < 0 || ghost_order > 1)
    throw std::invalid_argument("SimConfig: ghost_order must be 0 or 1");
}

namespace {

struct DirectSource {
  Vec2 q;
  double strength;  // amplitude before the 1/range spreading factor
  int wall;         // index of the owning wall, -1 for scatterers
};

// True if the open segment from `from` to `to` is blocked by a wall other
// than `skip_wall`.
bool occluded(const Scene& scene, Vec2 from, Vec2 to, int skip_wall) {
  Vec2 d = to - from;
  for (size_t i = 0; i < scene.walls.size(); ++i) {
    if (static_cast<int>(i) == skip_wall) continue;
    auto t = ray_segment(from, d, scene.walls[i].seg);
    if (t && *t > 1e-9 && *t < 1.0 - 1e-6) return true;
  }
  return false;
}

}  // namespace

std::vector<Reflector> visible_reflectors(const Scene& scene, const Pose& pose,
                                          const SimConfig& cfg) {
  const double range_cut = 1.5 * cfg.max_range;  // beyond this, beat tones stay
                                                 // outside the retained FFT bins
  const double cos_half = std::cos(deg2rad(cfg.specular_halfangle));

  std::vector<Reflector> out;
  // Positions and strengths of accepted direct returns, kept for the
  // multipath pass.
  std::vector<DirectSource> visible;

  auto try_direct = [&](Vec2 q, double strength, int wall_idx, bool specular,
                        Vec2 normal) {
    Vec2 rel = q - pose.pos;
    double rho = rel.norm();
    if (rho < 0.05 || rho > range_cut) return;
    double az = wrap_angle(std::atan2(rel.y, rel.x) - pose.heading);
    if (std::abs(az) > kPi / 2.0) return;
    if (occluded(scene, pose.pos, q, wall_idx)) return;
    double factor = 1.0;
    if (specular) {
      double cosi = std::abs((rel * (1.0 / rho)).dot(normal));
      if (cosi < cos_half) factor = 0.05;
    }
    double s = strength * factor;
    out.push_back({rho, std::sin(az), s / rho});
    visible.push_back({q, s, wall_idx});
  };

  for (size_t wi = 0; wi < scene.walls.size(); ++wi) {
    const Wall& w = scene.walls[wi];
    double len = w.seg.length();
    if (len <= 0.0) continue;
    int n = std::max(1, static_cast<int>(std::lround(len / cfg.wall_sample_spacing)));
    double ds = len / n;
    Vec2 u = w.seg.dir().normalized();
    Vec2 nrm = w.seg.normal();
    double strength = std::sqrt(w.reflectivity * ds);
    for (int i = 0; i < n; ++i) {
      Vec2 q = w.seg.p0 + u * ((i + 0.5) * ds);
      try_direct(q, strength, static_cast<int>(wi), w.specular, nrm);
    }
  }
  for (const Scatterer& s : scene.scatterers)
    try_direct(s.pos, std::sqrt(s.rcs), -1, false, {0.0, 0.0});

  if (cfg.ghost_order >= 1) {
    for (size_t wi = 0; wi < scene.walls.size(); ++wi) {
      const Wall& w = scene.walls[wi];
      if (!w.specular) continue;
      for (const DirectSource& src : visible) {
        if (src.wall == static_cast<int>(wi)) continue;
        Vec2 g = reflect_point(src.q, w.seg);
        Vec2 rel = g - pose.pos;
        double rho = rel.norm();
        if (rho < 0.05 || rho > range_cut) continue;
        double az = wrap_angle(std::atan2(rel.y, rel.x) - pose.heading);
        if (std::abs(az) > kPi / 2.0) continue;
        // Image-method validity: the mirror wall must sit on the sensor-ghost ray.
        auto t = ray_segment(pose.pos, rel, w.seg);
        if (!t || *t <= 1e-9 || *t >= 1.0) continue;
        double amp = src.strength * w.reflectivity * cfg.ghost_gain / rho;
        out.push_back({rho, std::sin(az), amp});
      }
    }
  }
  return out;
}

PolarImage lidar_scan(const Scene& scene, const Pose& pose, const SimConfig& cfg) {
  cfg.validate();
  PolarImage img(cfg.n_range_bins, cfg.n_lidar_az_bins, cfg.max_range,
                 AzimuthGrid::angle_uniform, ImageKind::binary);
  if (cfg.smoke) return img;

  for (int a = 0; a < cfg.n_lidar_az_bins; ++a) {
    double th = pose.heading - kPi / 2.0 + (a + 0.5) * kPi / cfg.n_lidar_az_bins;
    Vec2 dir{std::cos(th), std::sin(th)};
    double best = std::numeric_limits<double>::infinity();
    for (const Wall& w : scene.walls) {
      auto t = ray_segment(pose.pos, dir, w.seg);
      if (t && *t > 1e-9 && *t < best) best = *t;
    }
    if (best < cfg.max_range) {
      int bin = static_cast<int>(best / cfg.max_range * cfg.n_range_bins);
      if (bin >= 0 && bin < cfg.n_range_bins) img.at(bin, a) = 1.0f;
    }
  }
  return img;
}

ArraySnapshot radar_snapshot(const Scene& scene, const Pose& pose,
                             const SimConfig& cfg, uint64_t seed) {
  cfg.validate();
  ArraySnapshot snap;
  snap.n_antennas = cfg.n_antennas;
  snap.n_fast_time = cfg.n_fast_time;
  snap.wavelength = cfg.wavelength;
  snap.spacing = cfg.wavelength / 2.0;
  snap.noise_sigma = cfg.noise_sigma;
  snap.samples.assign(static_cast<size_t>(cfg.n_antennas) * cfg.n_fast_time,
                      {0.0, 0.0});

  const double phase_scale = 2.0 * kPi * snap.spacing / snap.wavelength;  // = pi
  for (const Reflector& r : visible_reflectors(scene, pose, cfg)) {
    // Beat tone whose FFT bin index is proportional to range.
    double f = r.range * cfg.n_range_bins / cfg.max_range;
    cplx tone_step = std::polar(1.0, 2.0 * kPi * f / cfg.n_fast_time);
    for (int k = 0; k < cfg.n_antennas; ++k) {
      cplx cur = std::polar(r.amplitude, phase_scale * k * r.sin_azimuth);
      cplx* row = &snap.at(k, 0);
      for (int n = 0; n < cfg.n_fast_time; ++n) {
        row[n] += cur;
        cur *= tone_step;
      }
    }
  }

  if (cfg.noise_sigma > 0.0) {
    auto rng = make_rng(seed, 0xad10);
    std::normal_distribution<double> g(0.0, cfg.noise_sigma / std::sqrt(2.0));
    for (auto& s : snap.samples) {
      double re = g(rng), im = g(rng);
      s += cplx{re, im};
    }
  }
  return snap;
}

}  // namespace r2l
