#pragma once

#include <filesystem>
#include <vector>

#include "r2l/polar_image.hpp"

namespace r2l {

// Plain (ASCII, P2) 8-bit PGM.
void write_pgm(const std::filesystem::path& path, int width, int height,
               const std::vector<uint8_t>& pixels);

// Renders a polar image to 8-bit grayscale rows top-to-bottom = far-to-near
// range. Values are min-max scaled unless the image is binary/probability,
// which use the natural [0,1] scale.
std::vector<uint8_t> to_gray(const PolarImage& img);

void write_pgm(const std::filesystem::path& path, const PolarImage& img);

// Side-by-side panels separated by a 1-px white gutter; all panels must share
// the same height (n_range).
void write_pgm_panels(const std::filesystem::path& path,
                      const std::vector<const PolarImage*>& panels);

}  // namespace r2l
