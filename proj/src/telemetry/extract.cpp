#include <cmath>

#include "hudtrace/core/png_io.hpp"
#include "hudtrace/telemetry.hpp"

namespace hudtrace {

ExtractionContext::ExtractionContext(HudLayout layout, GlyphAtlas glyphs, PhaseAtlas phases,
                                     const RgbImage& map, ExtractionParams params)
    : layout_(std::move(layout)),
      glyphs_(std::move(glyphs)),
      phases_(std::move(phases)),
      params_(params),
      map_width_(map.width),
      map_height_(map.height) {
  layout_.validate();
  glyphs_.validate();
  phases_.validate();
  locator_ = std::make_unique<MapLocator>(clahe(to_luma(map), params_.clahe), params_.locator);
}

std::shared_ptr<const ExtractionContext> ExtractionContext::load(const HudLayout& layout,
                                                                 ExtractionParams params) {
  return std::make_shared<const ExtractionContext>(layout, load_glyph_atlas(layout.glyph_atlas),
                                                   load_phase_atlas(layout.phase_atlas),
                                                   read_png_rgb(layout.map_image), params);
}

std::optional<MapPosition> locate_player(const RgbImage& minimap_crop, const ExtractionContext& ctx) {
  const HudLayout& layout = ctx.layout();
  GrayImage gray = to_luma(minimap_crop);
  if (layout.minimap_scale != 1.0) {
    const int w = static_cast<int>(std::lround(gray.width * layout.minimap_scale));
    const int h = static_cast<int>(std::lround(gray.height * layout.minimap_scale));
    gray = resize_nearest(gray, w, h);
  }
  if (gray.width > ctx.map_width() || gray.height > ctx.map_height()) return std::nullopt;
  ClaheParams cp = ctx.params().clahe;
  cp.tile_px = std::min({cp.tile_px, gray.width, gray.height});
  const GrayImage pre = clahe(gray, cp);
  const GrayImage mask =
      center_disk_mask(pre.width, pre.height, layout.minimap_mask_radius * pre.width);
  const MatchResult m = ctx.locator().locate(pre, mask);
  if (m.score < ctx.params().min_position_score) return std::nullopt;
  MapPosition p{m.x + pre.width / 2.0, m.y + pre.height / 2.0, m.score};
  if (p.x < 0 || p.y < 0 || p.x >= ctx.map_width() || p.y >= ctx.map_height()) return std::nullopt;
  return p;
}

namespace {

std::optional<CounterRead> read_counter_roi(const Frame& frame, const NormRect& rect,
                                            const ExtractionContext& ctx) {
  const auto crop = crop_roi(frame, rect);
  return read_counter(to_luma(crop.pixels), ctx.glyphs(), ctx.params().min_counter_score);
}

}  // namespace

FrameSample extract_sample(const Frame& frame, const ExtractionContext& ctx) {
  const HudLayout& layout = ctx.layout();
  FrameSample s;
  s.t_s = frame.timestamp.to_double();

  const auto icon = classify_icon(to_luma(crop_roi(frame, layout.phase_icon).pixels), ctx.phases(),
                                  ctx.params().min_icon_score);
  s.phase = icon.phase;
  s.phase_score = icon.score;

  if (const auto r = read_counter_roi(frame, layout.player_counter, ctx);
      r && r->value >= 1 && r->value <= kMaxPlayers) {
    s.players = r->value;
    s.players_score = r->score;
  }
  if (const auto r = read_counter_roi(frame, layout.kill_counter, ctx);
      r && r->value >= 0 && r->value <= kMaxKills) {
    s.kills = r->value;
    s.kills_score = r->score;
  }
  s.pos = locate_player(crop_roi(frame, layout.minimap).pixels, ctx);
  return s;
}

}  // namespace hudtrace
