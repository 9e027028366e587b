#include <algorithm>
#include <cmath>

#include "hudtrace/maps.hpp"

namespace hudtrace {

std::vector<ColorStop> default_palette() {
  return {{0.0, {0, 0, 0, 0}},
          {0.33, {0, 0, 255, 255}},
          {0.66, {0, 255, 0, 255}},
          {1.0, {255, 0, 0, 255}}};
}

namespace {

std::array<double, 4> sample_palette(const std::vector<ColorStop>& pal, double t) {
  if (t <= pal.front().pos) {
    const auto& c = pal.front().rgba;
    return {double(c[0]), double(c[1]), double(c[2]), double(c[3])};
  }
  for (std::size_t i = 1; i < pal.size(); ++i) {
    if (t <= pal[i].pos) {
      const double f = (t - pal[i - 1].pos) / (pal[i].pos - pal[i - 1].pos);
      std::array<double, 4> out{};
      for (int k = 0; k < 4; ++k) out[k] = pal[i - 1].rgba[k] + f * (pal[i].rgba[k] - pal[i - 1].rgba[k]);
      return out;
    }
  }
  const auto& c = pal.back().rgba;
  return {double(c[0]), double(c[1]), double(c[2]), double(c[3])};
}

std::uint8_t blend(std::uint8_t under, double over, double alpha) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(under * (1 - alpha) + over * alpha), 0L, 255L));
}

// Grid cell under a canvas pixel (nearest, centre sampling).
int cell_index(int p, int canvas, int cells) {
  return std::min(cells - 1, static_cast<int>((static_cast<long long>(p) * 2 + 1) * cells / (2LL * canvas)));
}

}  // namespace

RgbImage render(const HeatGrid& grid, const std::vector<ColorStop>& palette, const RgbImage* background) {
  const int gw = grid.spec.grid_w, gh = grid.spec.grid_h;
  RgbImage out = background && !background->empty() ? *background : RgbImage(gw, gh, 0);
  const double peak = grid.max();
  if (peak <= 0 || palette.empty()) return out;
  for (int y = 0; y < out.height; ++y) {
    const int cy = cell_index(y, out.height, gh);
    for (int x = 0; x < out.width; ++x) {
      const double v = grid.at(cell_index(x, out.width, gw), cy);
      const auto c = sample_palette(palette, v / peak);
      const double a = c[3] / 255.0;
      if (a <= 0) continue;
      auto* p = out.at(x, y);
      for (int k = 0; k < 3; ++k) p[k] = blend(p[k], c[k], a);
    }
  }
  return out;
}

void paint_hotspots(RgbImage& canvas, const HotSpotMap& map, const std::vector<int>& ids,
                    const HotSpotStyle& style) {
  const int gw = map.spec.grid_w, gh = map.spec.grid_h;
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(gw) * gh, 0);
  for (const auto& hs : map.hotspots) {
    if (std::find(ids.begin(), ids.end(), hs.id) == ids.end()) continue;
    for (const auto& r : hs.cells) {
      std::fill(mask.begin() + static_cast<std::ptrdiff_t>(r.y) * gw + r.x_begin,
                mask.begin() + static_cast<std::ptrdiff_t>(r.y) * gw + r.x_end, 1);
    }
  }
  const double a = style.alpha / 255.0;
  for (int y = 0; y < canvas.height; ++y) {
    const int cy = cell_index(y, canvas.height, gh);
    for (int x = 0; x < canvas.width; ++x) {
      if (!mask[static_cast<std::size_t>(cy) * gw + cell_index(x, canvas.width, gw)]) continue;
      auto* p = canvas.at(x, y);
      for (int k = 0; k < 3; ++k) p[k] = blend(p[k], style.rgb[k], a);
    }
  }
}

}  // namespace hudtrace
