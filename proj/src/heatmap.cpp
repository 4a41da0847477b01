#include "chron/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include <zlib.h>

namespace chron {

namespace {

void append_be32(std::string& s, std::uint32_t v) {
  s.push_back(static_cast<char>((v >> 24) & 0xff));
  s.push_back(static_cast<char>((v >> 16) & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
  s.push_back(static_cast<char>(v & 0xff));
}

void append_chunk(std::string& s, const char type[4], const std::string& data) {
  append_be32(s, static_cast<std::uint32_t>(data.size()));
  std::string body(type, 4);
  body += data;
  s += body;
  const auto crc =
      crc32(0, reinterpret_cast<const Bytef*>(body.data()), body.size());
  append_be32(s, static_cast<std::uint32_t>(crc));
}

// 3x5 glyphs for the color-bar labels, one bit per pixel, rows top-down.
const std::uint16_t* glyph(char ch) {
  static const std::uint16_t digits[10][5] = {
      {0b111, 0b101, 0b101, 0b101, 0b111},  // 0
      {0b010, 0b110, 0b010, 0b010, 0b111},  // 1
      {0b111, 0b001, 0b111, 0b100, 0b111},  // 2
      {0b111, 0b001, 0b111, 0b001, 0b111},  // 3
      {0b101, 0b101, 0b111, 0b001, 0b001},  // 4
      {0b111, 0b100, 0b111, 0b001, 0b111},  // 5
      {0b111, 0b100, 0b111, 0b101, 0b111},  // 6
      {0b111, 0b001, 0b010, 0b010, 0b010},  // 7
      {0b111, 0b101, 0b111, 0b101, 0b111},  // 8
      {0b111, 0b101, 0b111, 0b001, 0b111},  // 9
  };
  static const std::uint16_t minus[5] = {0b000, 0b000, 0b111, 0b000, 0b000};
  if (ch >= '0' && ch <= '9') return digits[ch - '0'];
  if (ch == '-') return minus;
  return nullptr;
}

void draw_text(Image& img, int x, int y, const std::string& text, Rgb color) {
  for (char ch : text) {
    const std::uint16_t* g = glyph(ch);
    if (g) {
      for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 3; ++c)
          if ((g[r] >> (2 - c)) & 1) {
            const int px = x + c, py = y + r;
            if (px >= 0 && px < img.width && py >= 0 && py < img.height)
              img.at(px, py) = color;
          }
    }
    x += 4;
  }
}

void fill_rect(Image& img, int x, int y, int w, int h, Rgb color) {
  for (int j = y; j < y + h; ++j)
    for (int i = x; i < x + w; ++i) img.at(i, j) = color;
}

}  // namespace

std::string encode_png(const Image& img) {
  if (img.width <= 0 || img.height <= 0 ||
      img.pixels.size() != static_cast<std::size_t>(img.width) * img.height)
    throw std::runtime_error("malformed image");
  std::string raw;
  raw.reserve(static_cast<std::size_t>(img.height) * (1 + 3 * img.width));
  for (int y = 0; y < img.height; ++y) {
    raw.push_back('\0');  // filter type: none
    for (int x = 0; x < img.width; ++x) {
      const Rgb& p = img.at(x, y);
      raw.push_back(static_cast<char>(p.r));
      raw.push_back(static_cast<char>(p.g));
      raw.push_back(static_cast<char>(p.b));
    }
  }
  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::string compressed(bound, '\0');
  if (compress2(reinterpret_cast<Bytef*>(compressed.data()), &bound,
                reinterpret_cast<const Bytef*>(raw.data()),
                static_cast<uLong>(raw.size()), 9) != Z_OK)
    throw std::runtime_error("deflate failed");
  compressed.resize(bound);

  std::string png("\x89PNG\r\n\x1a\n", 8);
  std::string ihdr;
  append_be32(ihdr, static_cast<std::uint32_t>(img.width));
  append_be32(ihdr, static_cast<std::uint32_t>(img.height));
  ihdr.push_back(8);   // bit depth
  ihdr.push_back(2);   // truecolor
  ihdr.push_back(0);   // deflate
  ihdr.push_back(0);   // filter method
  ihdr.push_back(0);   // no interlace
  append_chunk(png, "IHDR", ihdr);
  append_chunk(png, "IDAT", compressed);
  append_chunk(png, "IEND", "");
  return png;
}

Rgb heat_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  // Two-segment ramp: dark blue -> red -> yellow.
  auto lerp = [](int a, int b, double u) {
    return static_cast<std::uint8_t>(std::lround(a + (b - a) * u));
  };
  if (t < 0.5) {
    const double u = t * 2;
    return {lerp(20, 200, u), lerp(20, 40, u), lerp(120, 40, u)};
  }
  const double u = (t - 0.5) * 2;
  return {lerp(200, 250, u), lerp(40, 220, u), lerp(40, 40, u)};
}

Image render_heatmap(const std::vector<double>& grid, int c1, int c2,
                     int pixels_per_cell) {
  if (c1 <= 0 || c2 <= 0 ||
      grid.size() != static_cast<std::size_t>(c1) * c2)
    throw std::runtime_error("grid size does not match shape");
  if (pixels_per_cell < 1) throw std::runtime_error("pixels_per_cell < 1");
  const double lo = *std::min_element(grid.begin(), grid.end());
  const double hi = *std::max_element(grid.begin(), grid.end());
  const std::string lo_label = std::to_string(std::llround(lo));
  const std::string hi_label = std::to_string(std::llround(hi));
  const int label_w =
      4 * static_cast<int>(std::max(lo_label.size(), hi_label.size()));

  const int grid_w = c2 * pixels_per_cell;
  const int grid_h = c1 * pixels_per_cell;
  const int bar_w = 10;
  const int bar_h = std::max(grid_h, 24);
  Image img;
  img.width = grid_w + 6 + bar_w + 3 + label_w;
  img.height = std::max(grid_h, bar_h);
  img.pixels.assign(static_cast<std::size_t>(img.width) * img.height,
                    Rgb{255, 255, 255});

  for (int r = 0; r < c1; ++r)
    for (int c = 0; c < c2; ++c) {
      const double v = grid[static_cast<std::size_t>(r) * c2 + c];
      const double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
      fill_rect(img, c * pixels_per_cell, r * pixels_per_cell,
                pixels_per_cell, pixels_per_cell, heat_color(t));
    }

  const int bar_x = grid_w + 6;
  for (int j = 0; j < bar_h; ++j) {
    // Top of the bar shows the maximum.
    const double t = bar_h > 1 ? 1.0 - double(j) / (bar_h - 1) : 0.5;
    fill_rect(img, bar_x, j, bar_w, 1, heat_color(t));
  }
  const Rgb black{0, 0, 0};
  draw_text(img, bar_x + bar_w + 3, 0, hi_label, black);
  draw_text(img, bar_x + bar_w + 3, bar_h - 5, lo_label, black);
  return img;
}

Image render_partition(const Partition& part, int c1, int c2,
                       int pixels_per_cell) {
  if (c1 <= 0 || c2 <= 0 ||
      part.labels.size() != static_cast<std::size_t>(c1) * c2)
    throw std::runtime_error("partition size does not match shape");
  Image img;
  img.width = c2 * pixels_per_cell;
  img.height = c1 * pixels_per_cell;
  img.pixels.assign(static_cast<std::size_t>(img.width) * img.height, Rgb{});
  for (int r = 0; r < c1; ++r)
    for (int c = 0; c < c2; ++c) {
      Rgb color{200, 40, 40};
      const CellLabel l = part.labels[static_cast<std::size_t>(r) * c2 + c];
      if (l == CellLabel::green) color = {40, 170, 60};
      else if (l == CellLabel::blue) color = {50, 80, 200};
      fill_rect(img, c * pixels_per_cell, r * pixels_per_cell,
                pixels_per_cell, pixels_per_cell, color);
    }
  return img;
}

}  // namespace chron
