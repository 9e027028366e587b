#include <cstdio>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hudtrace/core/csv.hpp"
#include "hudtrace/core/error.hpp"
#include "hudtrace/core/kv.hpp"
#include "hudtrace/maps.hpp"

namespace hudtrace {

namespace fs = std::filesystem;

const std::vector<std::string> kHotspotHeader = {"id",      "kind",    "area",    "cx",     "cy",
                                                 "peak",    "bbox_x0", "bbox_y0", "bbox_x1", "bbox_y1"};

fs::path grid_meta_path(const fs::path& pgm) {
  fs::path p = pgm;
  p.replace_extension(".meta");
  return p;
}

namespace {

std::string spec_lines(const GridSpec& s) {
  std::ostringstream o;
  o << "grid_w=" << s.grid_w << "\n"
    << "grid_h=" << s.grid_h << "\n"
    << "x0=" << fmt_fixed(s.bounds.x0, 6) << "\n"
    << "y0=" << fmt_fixed(s.bounds.y0, 6) << "\n"
    << "x1=" << fmt_fixed(s.bounds.x1, 6) << "\n"
    << "y1=" << fmt_fixed(s.bounds.y1, 6) << "\n"
    << "kind=" << grid_kind_name(s.kind) << "\n";
  return o.str();
}

GridSpec spec_from(const KeyValueFile& kv) {
  GridSpec s;
  s.grid_w = static_cast<int>(kv.get_int("grid_w"));
  s.grid_h = static_cast<int>(kv.get_int("grid_h"));
  s.bounds = {kv.get_double("x0"), kv.get_double("y0"), kv.get_double("x1"), kv.get_double("y1")};
  const auto kind = parse_grid_kind(kv.get("kind"));
  if (!kind) throw InputError(kv.origin() + ": unknown grid kind '" + kv.get("kind") + "'");
  s.kind = *kind;
  if (s.grid_w <= 0 || s.grid_h <= 0 || !(s.bounds.x1 > s.bounds.x0) || !(s.bounds.y1 > s.bounds.y0)) {
    throw InputError(kv.origin() + ": invalid grid geometry");
  }
  return s;
}

}  // namespace

void write_grid(const fs::path& pgm, const HeatGrid& grid) {
  const double peak = grid.max();
  std::ofstream out(pgm, std::ios::binary);
  if (!out) throw InputError("cannot write " + pgm.string());
  out << "P5\n" << grid.spec.grid_w << " " << grid.spec.grid_h << "\n65535\n";
  std::string buf(grid.cells.size() * 2, '\0');
  for (std::size_t i = 0; i < grid.cells.size(); ++i) {
    const long v = peak > 0 ? std::lround(grid.cells[i] / peak * 65535.0) : 0;
    buf[2 * i] = static_cast<char>((v >> 8) & 0xff);
    buf[2 * i + 1] = static_cast<char>(v & 0xff);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw InputError("short write on " + pgm.string());

  std::string meta = spec_lines(grid.spec);
  meta += "sum=" + fmt_fixed(grid.sum(), 6) + "\n";
  meta += "max=" + fmt_fixed(peak, 9) + "\n";
  meta += "dropped=" + std::to_string(grid.dropped) + "\n";
  write_text_file(grid_meta_path(pgm), meta);
}

HeatGrid read_grid(const fs::path& pgm) {
  std::ifstream in(pgm, std::ios::binary);
  if (!in) throw InputError("cannot read grid " + pgm.string());
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  in.get();
  if (magic != "P5" || w <= 0 || h <= 0 || maxval != 65535) {
    throw InputError(pgm.string() + ": not a 16-bit P5 graymap");
  }
  const fs::path meta_path = grid_meta_path(pgm);
  if (!fs::exists(meta_path)) throw InputError("grid sidecar missing: " + meta_path.string());
  const auto kv = KeyValueFile::load(meta_path);
  HeatGrid g(spec_from(kv));
  if (g.spec.grid_w != w || g.spec.grid_h != h) throw InputError(pgm.string() + ": size disagrees with sidecar");
  const double peak = kv.get_double("max");
  g.dropped = kv.get_int_or("dropped", 0);
  std::string buf(static_cast<std::size_t>(w) * h * 2, '\0');
  in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (in.gcount() != static_cast<std::streamsize>(buf.size())) throw InputError(pgm.string() + ": truncated");
  for (std::size_t i = 0; i < g.cells.size(); ++i) {
    const unsigned v = (static_cast<unsigned char>(buf[2 * i]) << 8) | static_cast<unsigned char>(buf[2 * i + 1]);
    g.cells[i] = v / 65535.0 * peak;
  }
  return g;
}

void write_hotspots(const fs::path& csv, const HotSpotMap& map) {
  std::ostringstream o;
  CsvWriter w(o);
  w.row(kHotspotHeader);
  const std::string kind(grid_kind_name(map.spec.kind));
  for (const auto& hs : map.hotspots) {
    w.row({std::to_string(hs.id), kind, std::to_string(hs.area_cells), fmt_fixed(hs.centroid.x, 3),
           fmt_fixed(hs.centroid.y, 3), fmt_fixed(hs.peak_value, 6), fmt_fixed(hs.bbox.x0, 3),
           fmt_fixed(hs.bbox.y0, 3), fmt_fixed(hs.bbox.x1, 3), fmt_fixed(hs.bbox.y1, 3)});
  }
  write_text_file(csv, o.str());

  std::ostringstream c;
  c << spec_lines(map.spec) << "threshold_frac=" << fmt_fixed(map.params.threshold_frac, 6) << "\n"
    << "erode_n=" << map.params.erode_n << "\n"
    << "dilate_n=" << map.params.dilate_n << "\n"
    << "min_area=" << map.params.min_area << "\n";
  for (const auto& hs : map.hotspots) {
    c << "cells_" << hs.id << "=";
    for (std::size_t i = 0; i < hs.cells.size(); ++i) {
      c << (i ? " " : "") << hs.cells[i].y << ":" << hs.cells[i].x_begin << "-" << hs.cells[i].x_end;
    }
    c << "\n";
  }
  write_text_file(fs::path(csv.string() + ".cells"), c.str());
}

HotSpotMap read_hotspots(const fs::path& csv) {
  const auto table = read_csv(csv);
  require_header(table, kHotspotHeader, csv.string());
  const fs::path cells_path(csv.string() + ".cells");
  if (!fs::exists(cells_path)) throw InputError("hotspot cell sidecar missing: " + cells_path.string());
  const auto kv = KeyValueFile::load(cells_path);
  HotSpotMap map;
  map.spec = spec_from(kv);
  map.params = {kv.get_double("threshold_frac"), static_cast<int>(kv.get_int("erode_n")),
                static_cast<int>(kv.get_int("dilate_n")), static_cast<int>(kv.get_int("min_area"))};
  try {
    for (const auto& row : table.rows) {
      HotSpot hs;
      hs.id = static_cast<int>(parse_long(row[0]));
      hs.area_cells = static_cast<int>(parse_long(row[2]));
      hs.centroid = {parse_double(row[3]), parse_double(row[4])};
      hs.peak_value = parse_double(row[5]);
      hs.bbox = {parse_double(row[6]), parse_double(row[7]), parse_double(row[8]), parse_double(row[9])};
      std::istringstream runs(kv.get("cells_" + row[0]));
      std::string tok;
      int area = 0;
      while (runs >> tok) {
        CellRun r{};
        if (std::sscanf(tok.c_str(), "%d:%d-%d", &r.y, &r.x_begin, &r.x_end) != 3 || r.x_end <= r.x_begin) {
          throw InputError(cells_path.string() + ": bad cell run '" + tok + "'");
        }
        area += r.x_end - r.x_begin;
        hs.cells.push_back(r);
      }
      if (area != hs.area_cells) throw InputError(csv.string() + ": area disagrees with cell sidecar");
      map.hotspots.push_back(std::move(hs));
    }
  } catch (const std::invalid_argument& e) {
    throw InputError(csv.string() + ": " + e.what());
  }
  return map;
}

}  // namespace hudtrace
