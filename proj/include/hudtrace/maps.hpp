#pragma once

// Heat grids over map coordinates, Gaussian smoothing, hot-spot extraction
// (binarize, erode, dilate, 8-connected labelling), time slicing, boring-spot
// classification and PGM / PNG / CSV persistence.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hudtrace/core/geometry.hpp"
#include "hudtrace/core/image.hpp"

namespace hudtrace {

enum class GridKind { Activity, Landing, Killing };
std::string_view grid_kind_name(GridKind k) noexcept;
std::optional<GridKind> parse_grid_kind(std::string_view s) noexcept;

struct MapBounds {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  [[nodiscard]] bool contains(double x, double y) const noexcept {
    return x >= x0 && y >= y0 && x <= x1 && y <= y1;
  }
  friend bool operator==(const MapBounds&, const MapBounds&) = default;
};

struct GridSpec {
  int grid_w = 512;
  int grid_h = 512;
  MapBounds bounds;
  GridKind kind = GridKind::Activity;

  [[nodiscard]] double cell_w() const noexcept { return (bounds.x1 - bounds.x0) / grid_w; }
  [[nodiscard]] double cell_h() const noexcept { return (bounds.y1 - bounds.y0) / grid_h; }
  // Cell containing a map point; points on the far edge fall in the last cell.
  [[nodiscard]] std::optional<std::pair<int, int>> cell_of(double x, double y) const noexcept;
  [[nodiscard]] Point2 cell_center(double cx, double cy) const noexcept;
  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct HeatGrid {
  GridSpec spec;
  std::vector<double> cells;
  std::int64_t dropped = 0;  // points outside the bounds

  HeatGrid() = default;
  explicit HeatGrid(GridSpec s)
      : spec(s), cells(static_cast<std::size_t>(s.grid_w) * s.grid_h, 0.0) {}

  [[nodiscard]] double& at(int x, int y) { return cells[static_cast<std::size_t>(y) * spec.grid_w + x]; }
  [[nodiscard]] double at(int x, int y) const {
    return cells[static_cast<std::size_t>(y) * spec.grid_w + x];
  }
  [[nodiscard]] double sum() const;
  [[nodiscard]] double max() const;
};

HeatGrid accumulate(const std::vector<Point2>& points, const GridSpec& spec);
// Partial grids built on `jobs` threads and summed in chunk order.
HeatGrid accumulate_parallel(const std::vector<Point2>& points, const GridSpec& spec, unsigned jobs);
// Cell-wise sum; specs must match.
HeatGrid merge(const HeatGrid& a, const HeatGrid& b);

// Separable Gaussian; kernel truncated at ceil(3 sigma) and renormalized at the
// borders so that every cell's mass stays inside the grid.
HeatGrid smooth(const HeatGrid& grid, double sigma_cells = 2.0);

struct CellRun {
  int y, x_begin, x_end;  // [x_begin, x_end)
  friend bool operator==(const CellRun&, const CellRun&) = default;
};

struct HotSpot {
  int id = 0;
  std::vector<CellRun> cells;
  int area_cells = 0;
  Point2 centroid;          // map coordinates
  MapBounds bbox;           // map coordinates of the covering cell edges
  double peak_value = 0;
};

struct HotSpotParams {
  double threshold_frac = 0.25;
  int erode_n = 1;
  int dilate_n = 2;
  int min_area = 16;
};

struct HotSpotMap {
  GridSpec spec;
  HotSpotParams params;
  std::vector<HotSpot> hotspots;
};

// Binary mask helpers (values 0/1), exposed for tests.
std::vector<std::uint8_t> binarize(const HeatGrid& grid, double threshold_frac);
std::vector<std::uint8_t> erode3x3(const std::vector<std::uint8_t>& m, int w, int h);
std::vector<std::uint8_t> dilate3x3(const std::vector<std::uint8_t>& m, int w, int h);
// 8-connected labels (0 = background, 1..n in raster order of first cell).
std::vector<int> label8(const std::vector<std::uint8_t>& m, int w, int h, int* count = nullptr);

HotSpotMap extract_hotspots(const HeatGrid& grid, const HotSpotParams& params = {});

// Hotspot id whose cells contain the point, if any.
std::optional<int> contains(const HotSpotMap& map, Point2 p);

// Activity hotspots whose overlap with every killing hotspot is below
// `overlap_frac` of their own area. Both maps must share a grid spec.
std::vector<int> boring_spots(const HotSpotMap& activity, const HotSpotMap& killing,
                              double overlap_frac = 0.1);

struct TimedSample {
  double x = 0, y = 0;
  double t_rel_s = 0;  // seconds since the owning game started
};

struct TimeWindow {
  int index = 0;
  double start_s = 0, end_s = 0;
  HeatGrid grid;
};

// One grid per non-empty window [k*window_s, (k+1)*window_s).
std::vector<TimeWindow> time_sliced(const std::vector<TimedSample>& samples, double window_s,
                                    const GridSpec& spec);

struct ColorStop {
  double pos;
  std::array<std::uint8_t, 4> rgba;
};
std::vector<ColorStop> default_palette();

// Max-normalized colouring through the palette, alpha-composited over the
// background (resampled to the background size) or over black.
RgbImage render(const HeatGrid& grid, const std::vector<ColorStop>& palette = default_palette(),
                const RgbImage* background = nullptr);

struct HotSpotStyle {
  std::array<std::uint8_t, 3> rgb;
  std::uint8_t alpha = 180;
};
// Fills each listed hotspot's cells with its style colour.
void paint_hotspots(RgbImage& canvas, const HotSpotMap& map, const std::vector<int>& ids,
                    const HotSpotStyle& style);

// Grid persistence: 16-bit binary PGM scaled to the grid maximum plus a sidecar
// key-value file with bounds, kind, sum and max.
std::filesystem::path grid_meta_path(const std::filesystem::path& pgm);
void write_grid(const std::filesystem::path& pgm, const HeatGrid& grid);
HeatGrid read_grid(const std::filesystem::path& pgm);

// Hotspot CSV `id,kind,area,cx,cy,peak,bbox_x0,bbox_y0,bbox_x1,bbox_y1` plus a
// `<csv>.cells` sidecar holding the grid spec and run-length cell sets.
extern const std::vector<std::string> kHotspotHeader;
void write_hotspots(const std::filesystem::path& csv, const HotSpotMap& map);
HotSpotMap read_hotspots(const std::filesystem::path& csv);

}  // namespace hudtrace
