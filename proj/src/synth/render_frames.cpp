#include <algorithm>
#include <cmath>
#include <sstream>

#include "hudtrace/core/csv.hpp"
#include "hudtrace/core/error.hpp"
#include "hudtrace/core/kv.hpp"
#include "hudtrace/core/random.hpp"
#include "hudtrace/synth.hpp"

namespace hudtrace {

namespace {

constexpr int kFrameW = 1920, kFrameH = 1080;
constexpr std::uint8_t kCounterBg = 30, kIconBg = 40;
constexpr int kCounterInset = 4;
constexpr int kNoiseTable = 4096;

void fill(RgbImage& img, const PixelRect& r, std::uint8_t cr, std::uint8_t cg, std::uint8_t cb) {
  for (int y = r.y; y < r.y + r.h; ++y) {
    for (int x = r.x; x < r.x + r.w; ++x) img.set(x, y, cr, cg, cb);
  }
}

void blit_gray(RgbImage& img, const GrayImage& g, int ox, int oy, const PixelRect& clip) {
  for (int y = 0; y < g.height; ++y) {
    const int fy = oy + y;
    if (fy < clip.y || fy >= clip.y + clip.h) continue;
    for (int x = 0; x < g.width; ++x) {
      const int fx = ox + x;
      if (fx < clip.x || fx >= clip.x + clip.w) continue;
      const std::uint8_t v = g.at(x, y);
      img.set(fx, fy, v, v, v);
    }
  }
}

}  // namespace

ScenarioRenderer::ScenarioRenderer(const Scenario& scenario, const SynthWorld& world, RenderParams params)
    : scenario_(scenario), world_(world), params_(params), backdrop_(kFrameW, kFrameH) {
  if (params.noise_sigma < 0 || params.occlusion_rate < 0 || params.occlusion_rate > 1) {
    throw ConfigError("bad render parameters");
  }
  world.layout.validate();
  minimap_ = rasterize(world.layout.minimap, kFrameW, kFrameH);
  icon_ = rasterize(world.layout.phase_icon, kFrameW, kFrameH);
  kills_ = rasterize(world.layout.kill_counter, kFrameW, kFrameH);
  players_ = rasterize(world.layout.player_counter, kFrameW, kFrameH);
  // Reach of the minimap window must stay inside the map for every path point.
  const double half = 0.5 * minimap_.w * world.layout.minimap_scale + 1;
  for (const auto& p : scenario.path) {
    if (p.x - half < 0 || p.y - half < 0 || p.x + half > world.map.width || p.y + half > world.map.height) {
      throw ConfigError("scenario path too close to the map border for the minimap window");
    }
  }
  for (int y = 0; y < kFrameH; ++y) {
    const auto shade = static_cast<std::uint8_t>(60 + 50 * y / kFrameH);
    for (int x = 0; x < kFrameW; ++x) {
      backdrop_.set(x, y, static_cast<std::uint8_t>(shade / 2 + 20 * x / kFrameW), shade,
                    static_cast<std::uint8_t>(shade + 30));
    }
  }
}

bool ScenarioRenderer::occluded(int t) const {
  if (!scenario_.in_game(t) || params_.occlusion_rate <= 0) return false;
  Rng rng(mix_seed(params_.noise_seed ^ 0x6f63636c75646564ull, static_cast<std::uint64_t>(t)));
  return rng.u01() < params_.occlusion_rate;
}

TruthRow ScenarioRenderer::truth(int t) const {
  TruthRow r;
  r.t_s = t;
  r.phase = scenario_.phase_at(t);
  if (scenario_.in_game(t)) {
    r.pos = scenario_.position_at(t);
    r.players = scenario_.players_at(t);
    r.kills = scenario_.kills_at(t);
  }
  r.occluded = occluded(t);
  return r;
}

std::vector<TruthRow> ScenarioRenderer::truth_rows() const {
  std::vector<TruthRow> rows;
  for (int t = 0; t < frame_count(); ++t) rows.push_back(truth(t));
  return rows;
}

RgbImage ScenarioRenderer::render(int t) const {
  RgbImage img = backdrop_;
  const Phase phase = scenario_.phase_at(t);
  const bool in_game = scenario_.in_game(t);

  if (!in_game) {
    fill(img, minimap_, 50, 55, 60);
  } else if (occluded(t)) {
    fill(img, minimap_, 72, 72, 80);
  } else {
    const Point2 p = *scenario_.position_at(t);
    const double scale = world_.layout.minimap_scale;
    for (int j = 0; j < minimap_.h; ++j) {
      const int my = static_cast<int>(std::floor(p.y + (j + 0.5 - minimap_.h / 2.0) * scale));
      for (int i = 0; i < minimap_.w; ++i) {
        const int mx = static_cast<int>(std::floor(p.x + (i + 0.5 - minimap_.w / 2.0) * scale));
        const auto* src = world_.map.at(mx, my);
        img.set(minimap_.x + i, minimap_.y + j, src[0], src[1], src[2]);
      }
    }
    // Player marker: small upward triangle over the centre.
    const double cx = minimap_.x + minimap_.w / 2.0 - 0.5, cy = minimap_.y + minimap_.h / 2.0 - 0.5;
    for (int dy = -6; dy <= 6; ++dy) {
      for (int dx = -6; dx <= 6; ++dx) {
        if (std::abs(dx) * 2 <= dy + 6) img.set(static_cast<int>(cx + dx), static_cast<int>(cy + dy), 250, 250, 250);
      }
    }
  }

  fill(img, icon_, kIconBg, kIconBg, kIconBg);
  for (const auto& e : world_.phases.entries) {
    if (e.phase != phase) continue;
    blit_gray(img, e.bitmap, icon_.x + (icon_.w - e.bitmap.width) / 2, icon_.y + (icon_.h - e.bitmap.height) / 2,
              icon_);
  }

  fill(img, players_, kCounterBg, kCounterBg, kCounterBg);
  fill(img, kills_, kCounterBg, kCounterBg, kCounterBg);
  if (in_game) {
    blit_gray(img, render_counter(scenario_.players_at(t), world_.glyphs, kCounterBg), players_.x + kCounterInset,
              players_.y, players_);
    blit_gray(img, render_counter(scenario_.kills_at(t), world_.glyphs, kCounterBg), kills_.x + kCounterInset,
              kills_.y, kills_);
  }

  if (params_.noise_sigma > 0) {
    // Per-run Gaussian table indexed by a per-frame generator.
    std::vector<int> table(kNoiseTable);
    Rng trng(mix_seed(params_.noise_seed, 0x7461626c65ull));
    for (auto& v : table) v = static_cast<int>(std::lround(trng.normal() * params_.noise_sigma));
    Rng rng(mix_seed(params_.noise_seed, 1000003ull + static_cast<std::uint64_t>(t)));
    auto& px = img.pixels;
    std::size_t i = 0;
    while (i < px.size()) {
      std::uint64_t bits = rng.bits();
      for (int k = 0; k < 5 && i < px.size(); ++k, ++i, bits >>= 12) {
        px[i] = static_cast<std::uint8_t>(std::clamp(px[i] + table[bits & (kNoiseTable - 1)], 0, 255));
      }
    }
  }
  return img;
}

std::unique_ptr<FrameStream> render_frames(const ScenarioRenderer& renderer, std::string source_id) {
  return make_generated_stream(renderer.frame_count(), Rational(1), std::move(source_id),
                               [&renderer](std::int64_t i) { return renderer.render(static_cast<int>(i)); });
}

const std::vector<std::string> kTruthHeader = {"t_s", "phase", "x", "y", "players", "kills", "occluded"};

void write_truth_csv(std::ostream& out, const std::vector<TruthRow>& rows) {
  CsvWriter w(out);
  w.row(kTruthHeader);
  for (const auto& r : rows) {
    w.row({fmt_fixed(r.t_s, 3), std::string(phase_name(r.phase)), r.pos ? fmt_fixed(r.pos->x, 2) : "",
           r.pos ? fmt_fixed(r.pos->y, 2) : "", fmt_opt(r.players), fmt_opt(r.kills), r.occluded ? "1" : "0"});
  }
}

std::vector<TruthRow> read_truth_csv(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  require_header(table, kTruthHeader, path.string());
  std::vector<TruthRow> rows;
  try {
    for (const auto& f : table.rows) {
      TruthRow r;
      r.t_s = static_cast<int>(std::lround(parse_double(f[0])));
      const auto ph = parse_phase(f[1]);
      if (!ph) throw InputError(path.string() + ": unknown phase '" + f[1] + "'");
      r.phase = *ph;
      if (!f[2].empty()) r.pos = Point2{parse_double(f[2]), parse_double(f[3])};
      if (!f[4].empty()) r.players = static_cast<int>(parse_long(f[4]));
      if (!f[5].empty()) r.kills = static_cast<int>(parse_long(f[5]));
      r.occluded = f[6] == "1";
      rows.push_back(r);
    }
  } catch (const std::invalid_argument& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return rows;
}

}  // namespace hudtrace
