#include "r2l/pgm.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace r2l {

void write_pgm(const std::filesystem::path& path, int width, int height,
               const std::vector<uint8_t>& pixels) {
  if (static_cast<size_t>(width) * height != pixels.size())
    throw std::invalid_argument("write_pgm: pixel count mismatch");
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_pgm: cannot open " + path.string());
  f << "P2\n" << width << " " << height << "\n255\n";
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      f << static_cast<int>(pixels[static_cast<size_t>(r) * width + c]);
      f << (c + 1 == width ? '\n' : ' ');
    }
  }
  if (!f) throw std::runtime_error("write_pgm: write failed for " + path.string());
}

std::vector<uint8_t> to_gray(const PolarImage& img) {
  std::vector<uint8_t> px(img.size());
  float lo = 0.0f, hi = 1.0f;
  if (img.kind == ImageKind::magnitude || img.kind == ImageKind::normalized) {
    lo = *std::min_element(img.data.begin(), img.data.end());
    hi = *std::max_element(img.data.begin(), img.data.end());
    if (hi <= lo) hi = lo + 1.0f;
  }
  const float scale = 255.0f / (hi - lo);
  // Flip rows so far range renders at the top.
  for (int r = 0; r < img.n_range; ++r) {
    const int src = img.n_range - 1 - r;
    for (int a = 0; a < img.n_azimuth; ++a) {
      float v = (img.at(src, a) - lo) * scale;
      px[static_cast<size_t>(r) * img.n_azimuth + a] =
          static_cast<uint8_t>(std::clamp(v, 0.0f, 255.0f));
    }
  }
  return px;
}

void write_pgm(const std::filesystem::path& path, const PolarImage& img) {
  write_pgm(path, img.n_azimuth, img.n_range, to_gray(img));
}

void write_pgm_panels(const std::filesystem::path& path,
                      const std::vector<const PolarImage*>& panels) {
  if (panels.empty()) throw std::invalid_argument("write_pgm_panels: no panels");
  const int h = panels[0]->n_range;
  int w = -1;
  for (const PolarImage* p : panels) {
    if (p->n_range != h) throw std::invalid_argument("write_pgm_panels: height mismatch");
    w += p->n_azimuth + 1;
  }
  std::vector<uint8_t> out(static_cast<size_t>(w) * h, 255);
  int x0 = 0;
  for (const PolarImage* p : panels) {
    const auto gray = to_gray(*p);
    for (int r = 0; r < h; ++r)
      std::copy(gray.begin() + static_cast<size_t>(r) * p->n_azimuth,
                gray.begin() + static_cast<size_t>(r + 1) * p->n_azimuth,
                out.begin() + static_cast<size_t>(r) * w + x0);
    x0 += p->n_azimuth + 1;
  }
  write_pgm(path, w, h, out);
}

}  // namespace r2l
