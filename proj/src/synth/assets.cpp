#include <algorithm>
#include <array>
#include <cmath>

#include "hudtrace/core/csv.hpp"
#include "hudtrace/core/error.hpp"
#include "hudtrace/core/png_io.hpp"
#include "hudtrace/core/random.hpp"
#include "hudtrace/synth.hpp"

namespace hudtrace {

namespace fs = std::filesystem;

std::string_view strategy_name(LandingStrategy s) noexcept {
  switch (s) {
    case LandingStrategy::EdgeLander: return "edge";
    case LandingStrategy::HotSpotLander: return "hotspot";
    case LandingStrategy::Random: return "random";
  }
  return "random";
}

std::optional<LandingStrategy> parse_strategy(std::string_view s) noexcept {
  for (auto v : {LandingStrategy::EdgeLander, LandingStrategy::HotSpotLander, LandingStrategy::Random}) {
    if (strategy_name(v) == s) return v;
  }
  return std::nullopt;
}

namespace {

// Lattice value noise: hashed corner values, smoothstep blend.
struct ValueNoise {
  std::uint64_t seed;
  int period;

  double corner(int ix, int iy) const {
    const std::uint64_t h = mix_seed(seed, (static_cast<std::uint64_t>(static_cast<std::uint32_t>(ix)) << 32) |
                                               static_cast<std::uint32_t>(iy));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
  }
  double at(int x, int y) const {
    const int ix = x / period, iy = y / period;
    const double fx = (x % period + 0.5) / period, fy = (y % period + 0.5) / period;
    const double sx = fx * fx * (3 - 2 * fx), sy = fy * fy * (3 - 2 * fy);
    const double a = corner(ix, iy), b = corner(ix + 1, iy);
    const double c = corner(ix, iy + 1), d = corner(ix + 1, iy + 1);
    return (a + (b - a) * sx) * (1 - sy) + (c + (d - c) * sx) * sy;
  }
};

double fractal(const std::vector<ValueNoise>& octaves, const std::vector<double>& amps, int x, int y) {
  double v = 0, total = 0;
  for (std::size_t i = 0; i < octaves.size(); ++i) {
    v += amps[i] * octaves[i].at(x, y);
    total += amps[i];
  }
  return v / total;
}

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

constexpr std::array<std::array<const char*, 7>, 10> kFont = {{
    {"01110", "10001", "10011", "10101", "11001", "10001", "01110"},
    {"00100", "01100", "00100", "00100", "00100", "00100", "01110"},
    {"01110", "10001", "00001", "00010", "00100", "01000", "11111"},
    {"11111", "00010", "00100", "00010", "00001", "10001", "01110"},
    {"00010", "00110", "01010", "10010", "11111", "00010", "00010"},
    {"11111", "10000", "11110", "00001", "00001", "10001", "01110"},
    {"00110", "01000", "10000", "11110", "10001", "10001", "01110"},
    {"11111", "00001", "00010", "00100", "01000", "01000", "01000"},
    {"01110", "10001", "10001", "01110", "10001", "10001", "01110"},
    {"01110", "10001", "10001", "01111", "00001", "00010", "01100"},
}};

constexpr std::uint8_t kGlyphBg = 30, kGlyphFg = 230;
constexpr std::uint8_t kIconBg = 40, kIconFg = 220;
constexpr int kIconSize = 32;

}  // namespace

RgbImage make_map_image(int size, std::uint64_t seed) {
  if (size < 256) throw ConfigError("map size must be at least 256");
  std::vector<ValueNoise> lum, hue;
  std::vector<double> lum_amp, hue_amp;
  int k = 0;
  for (int p : {256, 128, 64, 32, 16, 8, 4}) {
    lum.push_back({mix_seed(seed, 100 + k), p});
    lum_amp.push_back(std::pow(p, 0.5));
    ++k;
  }
  for (int p : {512, 128, 32}) {
    hue.push_back({mix_seed(seed, 200 + k), p});
    hue_amp.push_back(1.0);
    ++k;
  }
  RgbImage img(size, size);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double l = fractal(lum, lum_amp, x, y);
      const double h = fractal(hue, hue_amp, x, y);
      const double v = 30 + 200 * std::clamp((l - 0.5) * 2.2 + 0.5, 0.0, 1.0);
      img.set(x, y, to_byte(v * (0.7 + 0.5 * h)), to_byte(v * (1.05 - 0.2 * h)), to_byte(v * (0.55 + 0.3 * (1 - h))));
    }
  }
  return img;
}

GlyphAtlas make_glyph_atlas() {
  GlyphAtlas atlas;
  atlas.glyph_height = 24;
  atlas.gap_px = 2;
  for (int d = 0; d < 10; ++d) {
    Glyph g{static_cast<char>('0' + d), GrayImage(16, 24, kGlyphBg)};
    for (int r = 0; r < 7; ++r) {
      for (int c = 0; c < 5; ++c) {
        if (kFont[d][r][c] != '1') continue;
        for (int dy = 0; dy < 3; ++dy) {
          for (int dx = 0; dx < 3; ++dx) g.bitmap.at(c * 3 + dx, 1 + r * 3 + dy) = kGlyphFg;
        }
      }
    }
    atlas.entries.push_back(std::move(g));
  }
  return atlas;
}

PhaseAtlas make_phase_atlas() {
  auto icon = [](auto inside) {
    GrayImage img(kIconSize, kIconSize, kIconBg);
    for (int y = 0; y < kIconSize; ++y) {
      for (int x = 0; x < kIconSize; ++x) {
        if (inside(x - 15.5, y - 15.5)) img.at(x, y) = kIconFg;
      }
    }
    return img;
  };
  PhaseAtlas atlas;
  // Lobby: hollow square.
  atlas.entries.push_back({Phase::Lobby, icon([](double dx, double dy) {
                             const double m = std::max(std::abs(dx), std::abs(dy));
                             return m <= 12 && m >= 8;
                           })});
  // Jump: downward pointing triangle.
  atlas.entries.push_back({Phase::Jump, icon([](double dx, double dy) {
                             return dy >= -11 && dy <= 12 && std::abs(dx) <= (12 - dy) * 0.5;
                           })});
  // Storm brewing: ring.
  atlas.entries.push_back({Phase::StormBrewing, icon([](double dx, double dy) {
                             const double r = std::hypot(dx, dy);
                             return r <= 13 && r >= 8.5;
                           })});
  // Contraction: diagonal cross.
  atlas.entries.push_back({Phase::Contraction, icon([](double dx, double dy) {
                             return std::max(std::abs(dx), std::abs(dy)) <= 13 &&
                                    (std::abs(dx - dy) <= 3.5 || std::abs(dx + dy) <= 3.5);
                           })});
  return atlas;
}

HudLayout default_layout() {
  auto norm = [](double x, double y, double w, double h) {
    return NormRect{x / 1920.0, y / 1080.0, w / 1920.0, h / 1080.0};
  };
  HudLayout l;
  l.minimap = norm(1640, 20, 240, 240);
  l.phase_icon = norm(1640, 262, 36, 36);
  l.player_counter = norm(1684, 268, 72, 24);
  l.kill_counter = norm(1764, 268, 72, 24);
  l.minimap_scale = 1.0;
  l.minimap_mask_radius = 0.06;
  return l;
}

std::vector<Point2> default_hot_sites(int map_size) {
  const double s = map_size / 2048.0;
  return {{520 * s, 560 * s}, {1480 * s, 480 * s}, {1024 * s, 1024 * s}, {600 * s, 1500 * s}, {1500 * s, 1450 * s}};
}

SynthWorld make_world(const WorldParams& p) {
  if (p.margin < 130 || 2 * p.margin >= p.map_size) throw ConfigError("world margin must leave room for the minimap");
  SynthWorld w;
  w.map = make_map_image(p.map_size, p.seed);
  w.glyphs = make_glyph_atlas();
  w.phases = make_phase_atlas();
  w.layout = default_layout();
  w.hot_sites = default_hot_sites(p.map_size);
  w.play_bounds = {p.margin, p.margin, p.map_size - p.margin, p.map_size - p.margin};
  return w;
}

fs::path write_world(const fs::path& dir, const SynthWorld& world) {
  fs::create_directories(dir);
  write_png(dir / "map.png", world.map, 6);
  save_glyph_atlas(dir / "glyphs", world.glyphs);
  save_phase_atlas(dir / "phases", world.phases);
  HudLayout l = world.layout;
  l.map_image = "map.png";
  l.glyph_atlas = "glyphs";
  l.phase_atlas = "phases";
  const fs::path layout = dir / "layout.txt";
  write_text_file(layout, format_hud_layout(l));
  return layout;
}

}  // namespace hudtrace
