#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "r2l/polar_image.hpp"
#include "r2l/scene.hpp"

namespace r2l {

struct SimConfig {
  double max_range = 10.0;
  int n_range_bins = 256;
  int n_radar_az_bins = 64;
  int n_lidar_az_bins = 512;
  double specular_halfangle = 25.0;  // degrees
  int ghost_order = 1;               // 0 disables multipath ghosts
  bool smoke = false;                // gates the lidar channel only
  uint64_t rng_seed = 0;

  // Array and signal parameters (carried into ArraySnapshot).
  int n_antennas = 8;
  int n_fast_time = 512;
  double wavelength = 0.004;      // m; element spacing is wavelength/2
  double noise_sigma = 0.5;       // linear amplitude of complex receiver noise
  double wall_sample_spacing = 0.05;  // m between wall point samples
  double ghost_gain = 0.35;           // extra amplitude factor on mirror ghosts

  void validate() const;
};

// Raw complex samples of one frame: one row of n_fast_time samples per antenna.
struct ArraySnapshot {
  int n_antennas = 0;
  int n_fast_time = 0;
  double wavelength = 0.0;
  double spacing = 0.0;      // element spacing, m
  double noise_sigma = 0.0;
  std::vector<std::complex<double>> samples;  // row-major [n_antennas][n_fast_time]

  std::complex<double>& at(int k, int n) {
    return samples[static_cast<size_t>(k) * n_fast_time + n];
  }
  std::complex<double> at(int k, int n) const {
    return samples[static_cast<size_t>(k) * n_fast_time + n];
  }
};

// Idealized point reflector as seen from one pose, after visibility,
// specularity, and multipath expansion.
struct Reflector {
  double range = 0.0;     // m
  double sin_azimuth = 0.0;
  double amplitude = 0.0; // linear
};

// Expands scene geometry into the visible reflectors for a pose: wall point
// samples (with specular-cone attenuation), point scatterers, and first-order
// mirror ghosts behind specular walls. Exposed for tests.
std::vector<Reflector> visible_reflectors(const Scene& scene, const Pose& pose,
                                          const SimConfig& cfg);

// Forward-facing lidar: n_lidar_az_bins rays over (-90, +90) degrees around
// the heading, first wall hit per ray, one occupied range cell per column.
// Smoke blanks the scan entirely.
PolarImage lidar_scan(const Scene& scene, const Pose& pose, const SimConfig& cfg);

// Beat-tone superposition over visible reflectors plus complex Gaussian
// receiver noise. Smoke has no effect on this output.
ArraySnapshot radar_snapshot(const Scene& scene, const Pose& pose,
                             const SimConfig& cfg, uint64_t seed);

}  // namespace r2l
