#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hudtrace/maps.hpp"

namespace hudtrace {

std::vector<std::uint8_t> binarize(const HeatGrid& grid, double threshold_frac) {
  std::vector<std::uint8_t> m(grid.cells.size(), 0);
  const double peak = grid.max();
  if (peak <= 0) return m;
  const double thr = threshold_frac * peak;
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = grid.cells[i] > 0 && grid.cells[i] >= thr;
  return m;
}

namespace {

template <bool Erode>
std::vector<std::uint8_t> morph(const std::vector<std::uint8_t>& m, int w, int h) {
  std::vector<std::uint8_t> out(m.size(), 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      bool all = true, any = false;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx, ny = y + dy;
          const bool v = nx >= 0 && ny >= 0 && nx < w && ny < h && m[static_cast<std::size_t>(ny) * w + nx];
          all = all && v;
          any = any || v;
        }
      }
      out[static_cast<std::size_t>(y) * w + x] = Erode ? all : any;
    }
  }
  return out;
}

}  // namespace

std::vector<std::uint8_t> erode3x3(const std::vector<std::uint8_t>& m, int w, int h) {
  return morph<true>(m, w, h);
}

std::vector<std::uint8_t> dilate3x3(const std::vector<std::uint8_t>& m, int w, int h) {
  return morph<false>(m, w, h);
}

std::vector<int> label8(const std::vector<std::uint8_t>& m, int w, int h, int* count) {
  std::vector<int> labels(m.size(), 0);
  std::vector<std::size_t> queue;
  int next = 0;
  for (std::size_t start = 0; start < m.size(); ++start) {
    if (!m[start] || labels[start]) continue;
    labels[start] = ++next;
    queue.assign(1, start);
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const int x = static_cast<int>(queue[q] % w), y = static_cast<int>(queue[q] / w);
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const std::size_t n = static_cast<std::size_t>(ny) * w + nx;
          if (m[n] && !labels[n]) {
            labels[n] = next;
            queue.push_back(n);
          }
        }
      }
    }
  }
  if (count) *count = next;
  return labels;
}

HotSpotMap extract_hotspots(const HeatGrid& grid, const HotSpotParams& params) {
  if (params.erode_n < 0 || params.dilate_n < 0 || params.min_area < 1 || !(params.threshold_frac > 0) ||
      params.threshold_frac > 1) {
    throw std::invalid_argument("bad hotspot parameters");
  }
  const int w = grid.spec.grid_w, h = grid.spec.grid_h;
  auto mask = binarize(grid, params.threshold_frac);
  for (int i = 0; i < params.erode_n; ++i) mask = erode3x3(mask, w, h);
  for (int i = 0; i < params.dilate_n; ++i) mask = dilate3x3(mask, w, h);
  int count = 0;
  const auto labels = label8(mask, w, h, &count);

  struct Acc {
    int area = 0;
    long double mass = 0, mx = 0, my = 0;
    double ux = 0, uy = 0, peak = 0;
    int x0 = 1 << 30, y0 = 1 << 30, x1 = -1, y1 = -1;
    std::vector<CellRun> runs;
  };
  std::vector<Acc> acc(count + 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int l = labels[static_cast<std::size_t>(y) * w + x];
      if (!l) continue;
      Acc& a = acc[l];
      const double v = grid.at(x, y);
      ++a.area;
      a.mass += v;
      a.mx += v * x;
      a.my += v * y;
      a.ux += x;
      a.uy += y;
      a.peak = std::max(a.peak, v);
      a.x0 = std::min(a.x0, x);
      a.y0 = std::min(a.y0, y);
      a.x1 = std::max(a.x1, x);
      a.y1 = std::max(a.y1, y);
      if (!a.runs.empty() && a.runs.back().y == y && a.runs.back().x_end == x) {
        ++a.runs.back().x_end;
      } else {
        a.runs.push_back({y, x, x + 1});
      }
    }
  }

  HotSpotMap out{grid.spec, params, {}};
  for (int l = 1; l <= count; ++l) {
    Acc& a = acc[l];
    if (a.area < params.min_area) continue;
    HotSpot hs;
    hs.id = static_cast<int>(out.hotspots.size()) + 1;
    hs.area_cells = a.area;
    hs.cells = std::move(a.runs);
    // Weighted sums run in extended precision and the cell coordinate is snapped
    // to 2^-20 cells, so rescaling the grid leaves the centroid bit-identical.
    auto snap = [](long double v) { return static_cast<double>(std::nearbyint(std::ldexp(v, 20))) / (1 << 20); };
    hs.centroid = a.mass > 0 ? grid.spec.cell_center(snap(a.mx / a.mass), snap(a.my / a.mass))
                             : grid.spec.cell_center(a.ux / a.area, a.uy / a.area);
    const auto& b = grid.spec.bounds;
    hs.bbox = {b.x0 + a.x0 * grid.spec.cell_w(), b.y0 + a.y0 * grid.spec.cell_h(),
               b.x0 + (a.x1 + 1) * grid.spec.cell_w(), b.y0 + (a.y1 + 1) * grid.spec.cell_h()};
    hs.peak_value = a.peak;
    out.hotspots.push_back(std::move(hs));
  }
  return out;
}

std::optional<int> contains(const HotSpotMap& map, Point2 p) {
  const auto c = map.spec.cell_of(p.x, p.y);
  if (!c) return std::nullopt;
  for (const auto& hs : map.hotspots) {
    for (const auto& r : hs.cells) {
      if (r.y == c->second && c->first >= r.x_begin && c->first < r.x_end) return hs.id;
    }
  }
  return std::nullopt;
}

namespace {

int run_overlap(const std::vector<CellRun>& a, const std::vector<CellRun>& b) {
  // Both lists are in raster order.
  int total = 0;
  std::size_t j = 0;
  for (const auto& ra : a) {
    while (j < b.size() && (b[j].y < ra.y || (b[j].y == ra.y && b[j].x_end <= ra.x_begin))) ++j;
    for (std::size_t k = j; k < b.size() && b[k].y == ra.y && b[k].x_begin < ra.x_end; ++k) {
      total += std::max(0, std::min(ra.x_end, b[k].x_end) - std::max(ra.x_begin, b[k].x_begin));
    }
  }
  return total;
}

}  // namespace

std::vector<int> boring_spots(const HotSpotMap& activity, const HotSpotMap& killing, double overlap_frac) {
  if (activity.spec.grid_w != killing.spec.grid_w || activity.spec.grid_h != killing.spec.grid_h ||
      !(activity.spec.bounds == killing.spec.bounds)) {
    throw std::invalid_argument("activity and killing hotspots use different grids");
  }
  std::vector<int> out;
  for (const auto& a : activity.hotspots) {
    bool boring = true;
    for (const auto& k : killing.hotspots) {
      if (run_overlap(a.cells, k.cells) >= overlap_frac * a.area_cells) {
        boring = false;
        break;
      }
    }
    if (boring) out.push_back(a.id);
  }
  return out;
}

}  // namespace hudtrace
