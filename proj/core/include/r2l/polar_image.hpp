#pragma once

#include <cassert>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "r2l/geometry.hpp"

namespace r2l {

// How the azimuth axis of a polar image is sampled over [-90 deg, +90 deg).
//   angle_uniform: bins uniform in angle (lidar scans).
//   sine_uniform:  bins uniform in sin(angle) (radar beamforming output).
enum class AzimuthGrid : uint8_t { angle_uniform = 0, sine_uniform = 1 };

// Value semantics of the pixels.
enum class ImageKind : uint8_t {
  magnitude = 0,   // >= 0
  normalized = 1,  // [0, 1]
  probability = 2, // [0, 1]
  binary = 3,      // {0, 1}
};

// Row-major [n_range][n_azimuth] single-channel image on a polar grid.
// Row r covers ranges [r, r+1) * max_range / n_range; bin centers sit at
// (r + 0.5) * max_range / n_range. Column a covers the azimuth interval
// implied by the grid convention; see azimuth_rad().
struct PolarImage {
  int n_range = 0;
  int n_azimuth = 0;
  double max_range = 0.0;
  AzimuthGrid grid = AzimuthGrid::angle_uniform;
  ImageKind kind = ImageKind::magnitude;
  std::vector<float> data;

  PolarImage() = default;
  PolarImage(int nr, int na, double rmax, AzimuthGrid g,
             ImageKind k = ImageKind::magnitude)
      : n_range(nr), n_azimuth(na), max_range(rmax), grid(g), kind(k),
        data(static_cast<size_t>(nr) * na, 0.0f) {
    if (nr <= 0 || na <= 0 || rmax <= 0.0)
      throw std::invalid_argument("PolarImage: non-positive dimension");
  }

  float& at(int r, int a) { return data[static_cast<size_t>(r) * n_azimuth + a]; }
  float at(int r, int a) const { return data[static_cast<size_t>(r) * n_azimuth + a]; }
  size_t size() const { return data.size(); }

  double range_m(int r) const { return (r + 0.5) * max_range / n_range; }

  // Azimuth of a bin center, in radians, measured from boresight
  // (positive toward +azimuth index).
  double azimuth_rad(int a) const {
    if (grid == AzimuthGrid::angle_uniform)
      return -kPi / 2.0 + (a + 0.5) * kPi / n_azimuth;
    // Beamformed bins are uniform in sin(theta): bin a covers
    // sin(theta) = 2*(a - n/2)/n, so bin n/2 is boresight and bin 0 is -90 deg.
    double s = 2.0 * (a - n_azimuth / 2) / n_azimuth;
    return std::asin(std::clamp(s, -1.0, 1.0));
  }

  bool same_shape(const PolarImage& o) const {
    return n_range == o.n_range && n_azimuth == o.n_azimuth &&
           max_range == o.max_range && grid == o.grid;
  }

  int count_nonzero() const {
    int n = 0;
    for (float v : data)
      if (v != 0.0f) ++n;
    return n;
  }
};

}  // namespace r2l
