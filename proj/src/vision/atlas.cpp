#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "hudtrace/core/error.hpp"
#include "hudtrace/core/kv.hpp"
#include "hudtrace/core/png_io.hpp"
#include "hudtrace/vision.hpp"

namespace hudtrace {

namespace fs = std::filesystem;

void GlyphAtlas::validate() const {
  if (glyph_height <= 0) throw ConfigError("glyph atlas: glyph_height must be positive");
  if (gap_px < 0) throw ConfigError("glyph atlas: gap must be non-negative");
  std::set<char> seen;
  for (const auto& g : entries) {
    if (!seen.insert(g.symbol).second) {
      throw ConfigError(std::string("glyph atlas: duplicate symbol '") + g.symbol + "'");
    }
    if (g.bitmap.height != glyph_height || g.bitmap.width <= 0) {
      throw ConfigError(std::string("glyph atlas: bitmap for '") + g.symbol +
                        "' does not match glyph_height");
    }
  }
  for (char d = '0'; d <= '9'; ++d) {
    if (!seen.count(d)) throw ConfigError(std::string("glyph atlas: digit '") + d + "' missing");
  }
}

const Glyph* GlyphAtlas::find(char symbol) const {
  for (const auto& g : entries) {
    if (g.symbol == symbol) return &g;
  }
  return nullptr;
}

void PhaseAtlas::validate() const {
  for (Phase p : kKnownPhases) {
    const auto n = std::count_if(entries.begin(), entries.end(),
                                 [p](const PhaseIcon& e) { return e.phase == p; });
    if (n != 1) {
      throw ConfigError("phase atlas: need exactly one bitmap for phase " +
                        std::string(phase_name(p)));
    }
  }
  for (const auto& e : entries) {
    if (e.phase == Phase::Unknown) throw ConfigError("phase atlas: 'unknown' is not an icon");
    if (e.bitmap.empty()) throw ConfigError("phase atlas: empty bitmap");
  }
}

namespace {

std::vector<std::string> meta_lines(const fs::path& dir) {
  std::ifstream in(dir / "atlas.meta");
  if (!in) throw InputError("cannot read " + (dir / "atlas.meta").string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    if (!trim(line).empty()) lines.push_back(trim(line));
  }
  return lines;
}

}  // namespace

GlyphAtlas load_glyph_atlas(const fs::path& dir) {
  GlyphAtlas atlas;
  bool have_height = false;
  for (const auto& line : meta_lines(dir)) {
    const auto toks = parse_kv_tokens(line);
    try {
      if (toks.size() == 1 && toks[0].first == "glyph_height") {
        atlas.glyph_height = static_cast<int>(parse_long(toks[0].second));
        have_height = true;
      } else if (toks.size() == 1 && toks[0].first == "gap") {
        atlas.gap_px = static_cast<int>(parse_long(toks[0].second));
      } else if (toks.size() == 2 && toks[0].first == "symbol" && toks[1].first == "file") {
        if (toks[0].second.size() != 1) throw ConfigError("glyph atlas: symbol must be one character");
        atlas.entries.push_back({toks[0].second[0], read_png_gray(dir / toks[1].second)});
      } else {
        throw ConfigError("glyph atlas: unrecognized line '" + line + "'");
      }
    } catch (const std::invalid_argument&) {
      throw ConfigError("glyph atlas: bad number in '" + line + "'");
    }
  }
  if (!have_height) throw ConfigError("glyph atlas: glyph_height missing");
  atlas.validate();
  return atlas;
}

PhaseAtlas load_phase_atlas(const fs::path& dir) {
  PhaseAtlas atlas;
  for (const auto& line : meta_lines(dir)) {
    const auto toks = parse_kv_tokens(line);
    if (toks.size() != 2 || toks[0].first != "phase" || toks[1].first != "file") {
      throw ConfigError("phase atlas: unrecognized line '" + line + "'");
    }
    const auto phase = parse_phase(toks[0].second);
    if (!phase) throw ConfigError("phase atlas: unknown phase '" + toks[0].second + "'");
    atlas.entries.push_back({*phase, read_png_gray(dir / toks[1].second)});
  }
  atlas.validate();
  return atlas;
}

void save_glyph_atlas(const fs::path& dir, const GlyphAtlas& atlas) {
  fs::create_directories(dir);
  std::ostringstream meta;
  meta << "glyph_height=" << atlas.glyph_height << "\ngap=" << atlas.gap_px << "\n";
  for (const auto& g : atlas.entries) {
    const std::string file = std::string("glyph_") +
                             (std::isalnum(static_cast<unsigned char>(g.symbol))
                                  ? std::string(1, g.symbol)
                                  : std::to_string(static_cast<int>(g.symbol))) +
                             ".png";
    write_png(dir / file, g.bitmap);
    meta << "symbol=" << g.symbol << " file=" << file << "\n";
  }
  std::ofstream(dir / "atlas.meta") << meta.str();
}

void save_phase_atlas(const fs::path& dir, const PhaseAtlas& atlas) {
  fs::create_directories(dir);
  std::ostringstream meta;
  for (const auto& e : atlas.entries) {
    const std::string file = std::string(phase_name(e.phase)) + ".png";
    write_png(dir / file, e.bitmap);
    meta << "phase=" << phase_name(e.phase) << " file=" << file << "\n";
  }
  std::ofstream(dir / "atlas.meta") << meta.str();
}

namespace {

// Zero-normalized correlation of `a` placed at (ax, ay) inside `b`'s frame over
// the overlapping rectangle only. Exact integer sums as in NccSearchImage.
double overlap_ncc(const GrayImage& a, const GrayImage& b, int ax, int ay) {
  const int x0 = std::max(0, ax), y0 = std::max(0, ay);
  const int x1 = std::min(b.width, ax + a.width), y1 = std::min(b.height, ay + a.height);
  if (x1 - x0 <= 0 || y1 - y0 <= 0) return 0.0;
  std::int64_t n = 0, sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      const std::int64_t va = a.at(x - ax, y - ay), vb = b.at(x, y);
      ++n;
      sa += va;
      sb += vb;
      saa += va * va;
      sbb += vb * vb;
      sab += va * vb;
    }
  }
  const std::int64_t var_a = n * saa - sa * sa, var_b = n * sbb - sb * sb;
  if (var_a == 0 || var_b == 0) return 0.0;
  const double r = static_cast<double>(n * sab - sa * sb) /
                   (std::sqrt(static_cast<double>(var_a)) * std::sqrt(static_cast<double>(var_b)));
  return std::clamp(r, -1.0, 1.0);
}

constexpr int kIconSlack = 2;

}  // namespace

IconClass classify_icon(const GrayImage& crop, const PhaseAtlas& atlas, double min_score) {
  IconClass best{Phase::Unknown, 0.0};
  double best_score = -2.0;
  Phase best_phase = Phase::Unknown;
  for (const auto& e : atlas.entries) {
    const int bx = (crop.width - e.bitmap.width) / 2;
    const int by = (crop.height - e.bitmap.height) / 2;
    double s = -2.0;
    for (int dy = -kIconSlack; dy <= kIconSlack; ++dy) {
      for (int dx = -kIconSlack; dx <= kIconSlack; ++dx) {
        s = std::max(s, overlap_ncc(e.bitmap, crop, bx + dx, by + dy));
      }
    }
    if (s > best_score) {
      best_score = s;
      best_phase = e.phase;
    }
  }
  if (best_score >= min_score) {
    best = {best_phase, best_score};
  } else {
    best.score = std::max(best_score, 0.0);
  }
  return best;
}

std::optional<CounterRead> read_counter(const GrayImage& input, const GlyphAtlas& atlas,
                                        double min_score) {
  if (input.empty() || atlas.entries.empty()) return std::nullopt;
  const int gh = atlas.glyph_height;
  if (std::abs(input.height - gh) * 4 > gh) return std::nullopt;
  GrayImage crop = input;
  if (input.height != gh) {
    const int w = std::max(1, static_cast<int>(std::lround(1.0 * input.width * gh / input.height)));
    crop = resize_nearest(input, w, gh);
  }
  const NccSearchImage search(crop);
  std::vector<NccTemplate> glyphs;
  int min_w = crop.width + 1;
  for (const auto& g : atlas.entries) {
    glyphs.emplace_back(g.bitmap);
    min_w = std::min(min_w, g.bitmap.width);
  }
  struct Hit {
    std::size_t glyph;
    double score;
  };
  auto best_at = [&](int x) {
    Hit h{0, -2.0};
    for (std::size_t i = 0; i < glyphs.size(); ++i) {
      if (x + glyphs[i].width() > crop.width) continue;
      const double s = search.score(glyphs[i], x, 0);
      if (s > h.score) h = {i, s};
    }
    return h;
  };

  std::string digits;
  double min_accepted = 1.0;
  int x = 0;
  while (x + min_w <= crop.width) {
    Hit h = best_at(x);
    if (h.score < min_score) {
      ++x;
      continue;
    }
    // The first column to clear the threshold may sit a few pixels before the
    // glyph; settle on the strongest alignment within half a glyph.
    int at = x;
    const int reach = atlas.entries[h.glyph].bitmap.width / 2;
    for (int x2 = x + 1; x2 <= x + reach && x2 + min_w <= crop.width; ++x2) {
      const Hit h2 = best_at(x2);
      if (h2.score > h.score) {
        h = h2;
        at = x2;
      }
    }
    const auto& g = atlas.entries[h.glyph];
    if (std::isdigit(static_cast<unsigned char>(g.symbol))) {
      digits += g.symbol;
      min_accepted = std::min(min_accepted, h.score);
    }
    x = at + g.bitmap.width + atlas.gap_px;
  }
  if (digits.empty() || digits.size() > 9) return std::nullopt;
  return CounterRead{std::stoi(digits), min_accepted};
}

GrayImage render_counter(int value, const GlyphAtlas& atlas, std::uint8_t background) {
  if (value < 0) throw std::invalid_argument("negative counter value");
  const std::string digits = std::to_string(value);
  int width = 0;
  std::vector<const Glyph*> glyphs;
  for (char c : digits) {
    const Glyph* g = atlas.find(c);
    if (!g) throw ConfigError(std::string("glyph atlas lacks '") + c + "'");
    glyphs.push_back(g);
    width += g->bitmap.width;
  }
  width += atlas.gap_px * static_cast<int>(glyphs.size() - 1);
  GrayImage out(width, atlas.glyph_height, background);
  int x = 0;
  for (const Glyph* g : glyphs) {
    for (int y = 0; y < atlas.glyph_height; ++y) {
      for (int gx = 0; gx < g->bitmap.width; ++gx) out.at(x + gx, y) = g->bitmap.at(gx, y);
    }
    x += g->bitmap.width + atlas.gap_px;
  }
  return out;
}

}  // namespace hudtrace
