#include "ieim/phantom.hpp"

#include <cmath>

namespace ieim {

namespace {

double quantize8(double v) { return std::round(v * 255.0) / 255.0; }

void fill_disk(Grid& g, double cx, double cy, double radius, double level) {
  const int x0 = std::max(0, static_cast<int>(cx - radius) - 1);
  const int x1 = std::min(g.width - 1, static_cast<int>(cx + radius) + 1);
  const int y0 = std::max(0, static_cast<int>(cy - radius) - 1);
  const int y1 = std::min(g.height - 1, static_cast<int>(cy + radius) + 1);
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) {
      const double dx = x - cx, dy = y - cy;
      if (dx * dx + dy * dy <= radius * radius) g.at(x, y) = level;
    }
}

void fill_bars(Grid& g, int x0, int y0, int bar_w, int bar_h, double level) {
  for (int k = 0; k < 3; ++k)
    for (int y = y0; y < std::min(g.height, y0 + bar_h); ++y)
      for (int x = x0 + k * 2 * bar_w; x < std::min(g.width, x0 + k * 2 * bar_w + bar_w); ++x)
        if (x >= 0 && y >= 0) g.at(x, y) = level;
}

}  // namespace

Grid make_target_phantom(int width, int height) {
  Grid g(width, height, 0.0);
  const double w = width, h = height;
  const double levels[4] = {quantize8(1.0), quantize8(0.85), quantize8(0.7), quantize8(0.5)};

  fill_disk(g, 0.28 * w, 0.30 * h, 0.14 * std::min(w, h), levels[0]);
  fill_disk(g, 0.68 * w, 0.26 * h, 0.10 * std::min(w, h), levels[1]);
  fill_disk(g, 0.24 * w, 0.70 * h, 0.08 * std::min(w, h), levels[2]);
  fill_disk(g, 0.55 * w, 0.62 * h, 0.05 * std::min(w, h), levels[3]);

  const int bw = std::max(2, width / 32);
  fill_bars(g, static_cast<int>(0.66 * w), static_cast<int>(0.55 * h), bw, height / 6,
            levels[0]);
  fill_bars(g, static_cast<int>(0.66 * w), static_cast<int>(0.78 * h), bw, height / 8,
            levels[2]);
  fill_bars(g, static_cast<int>(0.08 * w), static_cast<int>(0.08 * h), bw, height / 8,
            levels[3]);
  return g;
}

FluoroField make_translating_field(int width, int height, int cycles, int dx_per_cycle) {
  Grid base(width, height, 0.0);
  fill_disk(base, 0.25 * width, 0.5 * height, 0.12 * std::min(width, height), 1.0);
  fill_disk(base, 0.55 * width, 0.35 * height, 0.07 * std::min(width, height), quantize8(0.65));

  FluoroField field;
  field.width = width;
  field.height = height;
  field.frames.reserve(static_cast<std::size_t>(cycles));
  for (int c = 0; c < cycles; ++c) {
    const int off = (c * dx_per_cycle) % width;
    Grid g(width, height);
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x)
        g.at(x, y) = base.at(((x - off) % width + width) % width, y);
    field.frames.push_back(std::move(g));
  }
  return field;
}

}  // namespace ieim
