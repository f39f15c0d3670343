#pragma once

#include <complex>
#include <vector>

#include "r2l/polar_image.hpp"
#include "r2l/sim.hpp"

namespace r2l {

// Complex matrix, row-major [rows][cols].
struct ComplexMat {
  int rows = 0;
  int cols = 0;
  std::vector<std::complex<double>> data;

  ComplexMat() = default;
  ComplexMat(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c) {}
  std::complex<double>& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  std::complex<double> at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }
};

// Hann-windowed FFT along fast time; keeps the first n_range_bins
// positive-frequency bins. Output is [n_antennas][n_range_bins].
ComplexMat range_fft(const ArraySnapshot& snap, int n_range_bins);

// Per range row: zero-pad the antenna vector to n_az_bins, FFT, shift so
// column 0 is -90 degrees. Azimuth bins are uniform in sin(theta):
// sin(theta_b) = 2*(b - n_az/2)/n_az. Output magnitude image is
// [n_range_bins][n_az_bins].
PolarImage azimuth_fft(const ComplexMat& range_profiles, int n_az_bins,
                       double max_range);

// v -> log10(1+v), min-max scaled to [0,1], quantized to 256 levels.
// A constant image maps to all-zero.
PolarImage log_normalize(const PolarImage& img);

// Zeroes every pixel below the (1-keep_fraction) quantile of the nonzero
// values; survivors keep their intensity.
PolarImage low_threshold(const PolarImage& img, double keep_fraction);

// Default keep_fraction, calibrated so that the survivor count is roughly
// 15x the CA-CFAR detection count at 8 dB on a typical frame.
inline constexpr double kDefaultKeepFraction = 0.10;

struct CfarConfig {
  int guard_cells = 2;      // per side
  int train_cells = 8;      // per side
  double threshold_db = 8.0;

  void validate() const;
};

// 2D cell-averaging CFAR. A cell is detected iff its value exceeds the mean
// of the training ring (square window minus guard block) times
// 10^(threshold_db/10). At image borders the window is clamped and the mean
// renormalized by the actual training-cell count.
PolarImage ca_cfar(const PolarImage& img, const CfarConfig& cfg);

// Full radar image chain: range FFT -> azimuth FFT -> magnitude image.
PolarImage radar_image(const ArraySnapshot& snap, const SimConfig& cfg);

}  // namespace r2l
