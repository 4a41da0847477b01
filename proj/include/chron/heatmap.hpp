#ifndef CHRON_HEATMAP_HPP
#define CHRON_HEATMAP_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "chron/summaries.hpp"

namespace chron {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
};

struct Image {
  int width = 0, height = 0;
  std::vector<Rgb> pixels;  // row-major

  Rgb& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  const Rgb& at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
};

// zlib-backed 8-bit RGB PNG encoder.
std::string encode_png(const Image& img);

// Continuous heat colormap (dark blue -> yellow).
Rgb heat_color(double t);  // t in [0, 1]

// Per-cell raster of a c1 x c2 grid with a vertical color bar labeled with
// the grid min/max (integer years). Constant grids render a single color.
Image render_heatmap(const std::vector<double>& grid, int c1, int c2,
                     int pixels_per_cell = 16);

// Categorical raster of a green/blue/red partition (no color bar).
Image render_partition(const Partition& part, int c1, int c2,
                       int pixels_per_cell = 16);

}  // namespace chron

#endif
