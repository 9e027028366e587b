#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hudtrace/vision.hpp"

namespace hudtrace {

std::vector<double> clahe_transfer(const std::vector<double>& histogram, double clip_limit) {
  constexpr int kLevels = 256;
  std::vector<double> h = histogram;
  double n = 0;
  for (double v : h) n += v;
  std::vector<double> lut(kLevels);
  if (n <= 0) {
    for (int v = 0; v < kLevels; ++v) lut[v] = v;
    return lut;
  }
  if (clip_limit > 0 && std::isfinite(clip_limit)) {
    const double clip = clip_limit * n / kLevels;
    double excess = 0;
    for (double& v : h) {
      if (v > clip) {
        excess += v - clip;
        v = clip;
      }
    }
    const double share = excess / kLevels;
    for (double& v : h) v += share;
  }
  int lo = 0, hi = kLevels - 1;
  while (lo < kLevels && h[lo] <= 0) ++lo;
  while (hi > lo && h[hi] <= 0) --hi;
  // Mid-point of each level's cumulative mass, normalized so that the centre of
  // the lowest occupied level maps to 0 and the highest to 255.
  const double lo_mid = h[lo] / 2;
  double below = 0;
  for (int v = 0; v < lo; ++v) below += h[v];
  double hi_mid = 0;
  {
    double c = 0;
    for (int v = 0; v < hi; ++v) c += h[v];
    hi_mid = c + h[hi] / 2;
  }
  const double span = hi_mid - (below + lo_mid);
  if (span <= 0) {
    for (int v = 0; v < kLevels; ++v) lut[v] = v;
    return lut;
  }
  double cum = 0;
  for (int v = 0; v < kLevels; ++v) {
    const double mid = cum + h[v] / 2;
    lut[v] = std::clamp(255.0 * (mid - (below + lo_mid)) / span, 0.0, 255.0);
    cum += h[v];
  }
  return lut;
}

GrayImage clahe(const GrayImage& img, const ClaheParams& params) {
  if (params.tile_px <= 0) throw std::invalid_argument("clahe tile size must be positive");
  if (img.width < params.tile_px || img.height < params.tile_px) {
    throw std::invalid_argument("clahe: image " + std::to_string(img.width) + "x" +
                                std::to_string(img.height) + " smaller than tile " +
                                std::to_string(params.tile_px));
  }
  const int nx = img.width / params.tile_px;
  const int ny = img.height / params.tile_px;
  // Tile k spans [edge(k), edge(k+1)) with edges spread evenly over the image.
  auto edges = [](int dim, int n) {
    std::vector<int> e(n + 1);
    for (int k = 0; k <= n; ++k) e[k] = static_cast<int>(static_cast<std::int64_t>(k) * dim / n);
    return e;
  };
  const auto ex = edges(img.width, nx);
  const auto ey = edges(img.height, ny);

  std::vector<std::vector<double>> luts(static_cast<std::size_t>(nx) * ny);
  std::vector<double> hist(256);
  for (int ty = 0; ty < ny; ++ty) {
    for (int tx = 0; tx < nx; ++tx) {
      std::fill(hist.begin(), hist.end(), 0.0);
      for (int y = ey[ty]; y < ey[ty + 1]; ++y) {
        const auto* row = img.values.data() + static_cast<std::size_t>(y) * img.width;
        for (int x = ex[tx]; x < ex[tx + 1]; ++x) hist[row[x]] += 1;
      }
      luts[static_cast<std::size_t>(ty) * nx + tx] = clahe_transfer(hist, params.clip_limit);
    }
  }

  std::vector<double> cx(nx), cy(ny);
  for (int k = 0; k < nx; ++k) cx[k] = 0.5 * (ex[k] + ex[k + 1]) - 0.5;
  for (int k = 0; k < ny; ++k) cy[k] = 0.5 * (ey[k] + ey[k + 1]) - 0.5;
  // For a coordinate, the pair of neighbouring tile centres and the blend weight
  // of the second one; outside the outermost centres a single tile is used.
  struct Blend {
    int a, b;
    double w;
  };
  auto blend = [](const std::vector<double>& c, int v) {
    const int n = static_cast<int>(c.size());
    if (v <= c.front()) return Blend{0, 0, 0.0};
    if (v >= c.back()) return Blend{n - 1, n - 1, 0.0};
    int k = 0;
    while (k + 1 < n && c[k + 1] <= v) ++k;
    return Blend{k, k + 1, (v - c[k]) / (c[k + 1] - c[k])};
  };
  std::vector<Blend> bx(img.width);
  for (int x = 0; x < img.width; ++x) bx[x] = blend(cx, x);

  GrayImage out(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    const Blend by = blend(cy, y);
    const auto* src = img.values.data() + static_cast<std::size_t>(y) * img.width;
    auto* dst = out.values.data() + static_cast<std::size_t>(y) * img.width;
    for (int x = 0; x < img.width; ++x) {
      const int v = src[x];
      const Blend& b = bx[x];
      const double top = (1 - b.w) * luts[static_cast<std::size_t>(by.a) * nx + b.a][v] +
                         b.w * luts[static_cast<std::size_t>(by.a) * nx + b.b][v];
      const double bot = (1 - b.w) * luts[static_cast<std::size_t>(by.b) * nx + b.a][v] +
                         b.w * luts[static_cast<std::size_t>(by.b) * nx + b.b][v];
      const double r = (1 - by.w) * top + by.w * bot;
      dst[x] = static_cast<std::uint8_t>(std::clamp(std::lround(r), 0L, 255L));
    }
  }
  return out;
}

}  // namespace hudtrace
