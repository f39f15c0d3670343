#include "r2l/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "r2l/fft.hpp"

namespace r2l {

ComplexMat range_fft(const ArraySnapshot& snap, int n_range_bins) {
  if (n_range_bins <= 0 || n_range_bins > snap.n_fast_time / 2)
    throw std::invalid_argument("range_fft: need 0 < n_range_bins <= n_fast_time/2");

  const std::vector<double> win = hann_window(snap.n_fast_time);
  ComplexMat out(snap.n_antennas, n_range_bins);
  std::vector<cplx> buf(snap.n_fast_time);
  for (int k = 0; k < snap.n_antennas; ++k) {
    for (int n = 0; n < snap.n_fast_time; ++n) buf[n] = snap.at(k, n) * win[n];
    fft_inplace(buf);
    for (int r = 0; r < n_range_bins; ++r) out.at(k, r) = buf[r];
  }
  return out;
}

PolarImage azimuth_fft(const ComplexMat& range_profiles, int n_az_bins,
                       double max_range) {
  const int n_ant = range_profiles.rows;
  const int n_range = range_profiles.cols;
  if (!is_pow2(static_cast<size_t>(n_az_bins)) || n_az_bins < n_ant)
    throw std::invalid_argument("azimuth_fft: n_az_bins must be a power of two >= n_antennas");

  PolarImage img(n_range, n_az_bins, max_range, AzimuthGrid::sine_uniform,
                 ImageKind::magnitude);
  std::vector<cplx> col(n_az_bins);
  for (int r = 0; r < n_range; ++r) {
    std::fill(col.begin(), col.end(), cplx{0.0, 0.0});
    for (int k = 0; k < n_ant; ++k) col[k] = range_profiles.at(k, r);
    fft_inplace(col);
    fftshift_inplace(col);
    for (int b = 0; b < n_az_bins; ++b)
      img.at(r, b) = static_cast<float>(std::abs(col[b]));
  }
  return img;
}

PolarImage log_normalize(const PolarImage& img) {
  if (img.kind != ImageKind::magnitude)
    throw std::invalid_argument("log_normalize: expects a magnitude image");
  PolarImage out(img.n_range, img.n_azimuth, img.max_range, img.grid,
                 ImageKind::normalized);
  std::vector<double> logs(img.size());
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < img.size(); ++i) {
    double l = std::log10(1.0 + static_cast<double>(img.data[i]));
    logs[i] = l;
    lo = std::min(lo, l);
    hi = std::max(hi, l);
  }
  if (!(hi > lo)) return out;  // constant image -> all zero
  const double scale = 1.0 / (hi - lo);
  for (size_t i = 0; i < img.size(); ++i) {
    double norm = (logs[i] - lo) * scale;
    out.data[i] = static_cast<float>(std::lround(norm * 255.0) / 255.0);
  }
  return out;
}

PolarImage low_threshold(const PolarImage& img, double keep_fraction) {
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0))
    throw std::invalid_argument("low_threshold: keep_fraction in (0, 1]");
  PolarImage out = img;
  std::vector<float> nz;
  nz.reserve(img.size());
  for (float v : img.data)
    if (v != 0.0f) nz.push_back(v);
  if (nz.empty()) return out;

  const size_t n = nz.size();
  size_t k = static_cast<size_t>(std::llround(keep_fraction * static_cast<double>(n)));
  k = std::clamp<size_t>(k, 1, n);
  std::nth_element(nz.begin(), nz.begin() + (k - 1), nz.end(), std::greater<float>());
  const float cut = nz[k - 1];  // k-th largest nonzero value
  for (float& v : out.data)
    if (v < cut) v = 0.0f;
  return out;
}

void CfarConfig::validate() const {
  if (guard_cells < 0) throw std::invalid_argument("CfarConfig: guard_cells >= 0");
  if (train_cells < 1) throw std::invalid_argument("CfarConfig: train_cells >= 1");
  if (!std::isfinite(threshold_db)) throw std::invalid_argument("CfarConfig: threshold_db finite");
}

PolarImage ca_cfar(const PolarImage& img, const CfarConfig& cfg) {
  cfg.validate();
  const int window = 2 * (cfg.guard_cells + cfg.train_cells) + 1;
  if (img.n_range < window || img.n_azimuth < window)
    throw std::invalid_argument("ca_cfar: image smaller than the CFAR window");

  const int R = img.n_range, C = img.n_azimuth;
  // Summed-area table; sat(r, c) = sum of img[0..r)[0..c).
  std::vector<double> sat(static_cast<size_t>(R + 1) * (C + 1), 0.0);
  auto sat_at = [&](int r, int c) -> double& {
    return sat[static_cast<size_t>(r) * (C + 1) + c];
  };
  for (int r = 0; r < R; ++r)
    for (int c = 0; c < C; ++c)
      sat_at(r + 1, c + 1) = static_cast<double>(img.at(r, c)) + sat_at(r, c + 1) +
                             sat_at(r + 1, c) - sat_at(r, c);
  auto rect_sum = [&](int r0, int r1, int c0, int c1) {  // inclusive, clamped
    r0 = std::max(r0, 0);
    c0 = std::max(c0, 0);
    r1 = std::min(r1, R - 1);
    c1 = std::min(c1, C - 1);
    return sat_at(r1 + 1, c1 + 1) - sat_at(r0, c1 + 1) - sat_at(r1 + 1, c0) + sat_at(r0, c0);
  };
  auto rect_count = [&](int r0, int r1, int c0, int c1) {
    r0 = std::max(r0, 0);
    c0 = std::max(c0, 0);
    r1 = std::min(r1, R - 1);
    c1 = std::min(c1, C - 1);
    return (r1 - r0 + 1) * (c1 - c0 + 1);
  };

  const int g = cfg.guard_cells, t = cfg.train_cells;
  const double factor = std::pow(10.0, cfg.threshold_db / 10.0);
  PolarImage out(R, C, img.max_range, img.grid, ImageKind::binary);
  for (int r = 0; r < R; ++r) {
    for (int c = 0; c < C; ++c) {
      double train_sum = rect_sum(r - g - t, r + g + t, c - g - t, c + g + t) -
                         rect_sum(r - g, r + g, c - g, c + g);
      int train_n = rect_count(r - g - t, r + g + t, c - g - t, c + g + t) -
                    rect_count(r - g, r + g, c - g, c + g);
      if (train_n <= 0) continue;
      double mean = train_sum / train_n;
      if (static_cast<double>(img.at(r, c)) > mean * factor) out.at(r, c) = 1.0f;
    }
  }
  return out;
}

PolarImage radar_image(const ArraySnapshot& snap, const SimConfig& cfg) {
  ComplexMat profiles = range_fft(snap, cfg.n_range_bins);
  return azimuth_fft(profiles, cfg.n_radar_az_bins, cfg.max_range);
}

}  // namespace r2l
