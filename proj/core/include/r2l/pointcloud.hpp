#pragma once

#include <vector>

#include "r2l/geometry.hpp"
#include "r2l/polar_image.hpp"

namespace r2l {

// Sensor-frame cloud: origin at the sensor, +y along boresight, +x toward
// +90 degrees azimuth.
struct PointCloud2D {
  std::vector<Vec2> pts;

  bool empty() const { return pts.empty(); }
  size_t size() const { return pts.size(); }
};

// pixel -> 1 iff value >= tau. Requires 0 < tau < 1.
PolarImage threshold_image(const PolarImage& prob, double tau);

// Occupied cells -> points at (rho*sin(theta), rho*cos(theta)) using the
// image's own range/azimuth bin conventions.
PointCloud2D polar_to_points(const PolarImage& binary);

// Exact nearest-neighbor distance from every point of `from` to the cloud
// `to` (grid-bucket accelerated; results match brute force bit for bit).
// `to` must be nonempty.
std::vector<double> nn_distances(const PointCloud2D& from, const PointCloud2D& to);

double median_of(std::vector<double> v);

// Mean over the |a|+|b| nearest-neighbor distances (both directions).
// Throws std::invalid_argument if either cloud is empty.
double chamfer(const PointCloud2D& a, const PointCloud2D& b);

// Max over the two directions of the median nearest-neighbor distance.
// Throws std::invalid_argument if either cloud is empty.
double mod_hausdorff(const PointCloud2D& a, const PointCloud2D& b);

}  // namespace r2l
