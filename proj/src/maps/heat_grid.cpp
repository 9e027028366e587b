#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hudtrace/core/parallel.hpp"
#include "hudtrace/maps.hpp"

namespace hudtrace {

std::string_view grid_kind_name(GridKind k) noexcept {
  switch (k) {
    case GridKind::Activity: return "activity";
    case GridKind::Landing: return "landing";
    case GridKind::Killing: return "killing";
  }
  return "activity";
}

std::optional<GridKind> parse_grid_kind(std::string_view s) noexcept {
  for (GridKind k : {GridKind::Activity, GridKind::Landing, GridKind::Killing}) {
    if (grid_kind_name(k) == s) return k;
  }
  return std::nullopt;
}

std::optional<std::pair<int, int>> GridSpec::cell_of(double x, double y) const noexcept {
  if (!bounds.contains(x, y)) return std::nullopt;
  const int cx = std::min(grid_w - 1, static_cast<int>(std::floor((x - bounds.x0) / cell_w())));
  const int cy = std::min(grid_h - 1, static_cast<int>(std::floor((y - bounds.y0) / cell_h())));
  return std::pair{cx, cy};
}

Point2 GridSpec::cell_center(double cx, double cy) const noexcept {
  return {bounds.x0 + (cx + 0.5) * cell_w(), bounds.y0 + (cy + 0.5) * cell_h()};
}

double HeatGrid::sum() const {
  double s = 0;
  for (double v : cells) s += v;
  return s;
}

double HeatGrid::max() const {
  double m = 0;
  for (double v : cells) m = std::max(m, v);
  return m;
}

HeatGrid accumulate(const std::vector<Point2>& points, const GridSpec& spec) {
  if (spec.grid_w <= 0 || spec.grid_h <= 0) throw std::invalid_argument("empty grid spec");
  HeatGrid g(spec);
  for (const auto& p : points) {
    if (const auto c = spec.cell_of(p.x, p.y)) {
      g.at(c->first, c->second) += 1;
    } else {
      ++g.dropped;
    }
  }
  return g;
}

HeatGrid merge(const HeatGrid& a, const HeatGrid& b) {
  if (!(a.spec == b.spec)) throw std::invalid_argument("merging grids with different specs");
  HeatGrid out = a;
  for (std::size_t i = 0; i < out.cells.size(); ++i) out.cells[i] += b.cells[i];
  out.dropped += b.dropped;
  return out;
}

HeatGrid accumulate_parallel(const std::vector<Point2>& points, const GridSpec& spec, unsigned jobs) {
  jobs = std::max(1u, jobs);
  const std::size_t chunks = jobs;
  std::vector<HeatGrid> partial(chunks);
  parallel_for(chunks, jobs, [&](std::size_t c) {
    const std::size_t b = points.size() * c / chunks;
    const std::size_t e = points.size() * (c + 1) / chunks;
    partial[c] = accumulate(std::vector<Point2>(points.begin() + b, points.begin() + e), spec);
  });
  HeatGrid out(spec);
  for (const auto& p : partial) out = merge(out, p);
  return out;
}

namespace {

// Scatter each cell's value along one axis with border-renormalized weights.
void smooth_axis(const std::vector<double>& in, std::vector<double>& out, int w, int h, bool along_x,
                 const std::vector<double>& kernel) {
  const int radius = static_cast<int>(kernel.size()) - 1;
  const int len = along_x ? w : h;
  const int lines = along_x ? h : w;
  std::fill(out.begin(), out.end(), 0.0);
  std::vector<double> norm(len);
  for (int i = 0; i < len; ++i) {
    double s = 0;
    for (int k = -radius; k <= radius; ++k) {
      if (i + k >= 0 && i + k < len) s += kernel[std::abs(k)];
    }
    norm[i] = s;
  }
  for (int line = 0; line < lines; ++line) {
    auto idx = [&](int i) {
      return along_x ? static_cast<std::size_t>(line) * w + i : static_cast<std::size_t>(i) * w + line;
    };
    for (int i = 0; i < len; ++i) {
      const double v = in[idx(i)];
      if (v == 0) continue;
      const double scale = v / norm[i];
      const int lo = std::max(0, i - radius), hi = std::min(len - 1, i + radius);
      for (int j = lo; j <= hi; ++j) out[idx(j)] += scale * kernel[std::abs(j - i)];
    }
  }
}

}  // namespace

HeatGrid smooth(const HeatGrid& grid, double sigma_cells) {
  if (sigma_cells < 0) throw std::invalid_argument("negative smoothing sigma");
  if (sigma_cells == 0) return grid;
  const int radius = static_cast<int>(std::ceil(3 * sigma_cells));
  std::vector<double> kernel(radius + 1);
  for (int k = 0; k <= radius; ++k) kernel[k] = std::exp(-0.5 * k * k / (sigma_cells * sigma_cells));
  HeatGrid out = grid;
  std::vector<double> tmp(grid.cells.size());
  smooth_axis(grid.cells, tmp, grid.spec.grid_w, grid.spec.grid_h, true, kernel);
  smooth_axis(tmp, out.cells, grid.spec.grid_w, grid.spec.grid_h, false, kernel);
  return out;
}

std::vector<TimeWindow> time_sliced(const std::vector<TimedSample>& samples, double window_s,
                                    const GridSpec& spec) {
  if (!(window_s > 0)) throw std::invalid_argument("time window must be positive");
  std::vector<std::pair<int, Point2>> keyed;
  keyed.reserve(samples.size());
  for (const auto& s : samples) {
    if (s.t_rel_s < 0) continue;
    keyed.emplace_back(static_cast<int>(std::floor(s.t_rel_s / window_s)), Point2{s.x, s.y});
  }
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<TimeWindow> out;
  for (std::size_t i = 0; i < keyed.size();) {
    std::size_t j = i;
    std::vector<Point2> pts;
    while (j < keyed.size() && keyed[j].first == keyed[i].first) pts.push_back(keyed[j++].second);
    const int k = keyed[i].first;
    out.push_back({k, k * window_s, (k + 1) * window_s, accumulate(pts, spec)});
    i = j;
  }
  return out;
}

}  // namespace hudtrace
