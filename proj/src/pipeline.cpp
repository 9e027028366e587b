#include "hudtrace/pipeline.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "hudtrace/core/csv.hpp"
#include "hudtrace/core/error.hpp"
#include "hudtrace/core/log.hpp"
#include "hudtrace/synth.hpp"

namespace hudtrace {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> kConfigKeys = {
    "layout",
    "sample_rate",
    "output_dir",
    "clahe.tile_px",
    "clahe.clip_limit",
    "extract.min_position_score",
    "extract.min_icon_score",
    "extract.min_counter_score",
    "locator.min_coarse_dim",
    "locator.candidates",
    "locator.suppression_px",
    "locator.refine_radius",
    "locator.min_survivors",
    "segment.hysteresis_s",
    "segment.min_game_s",
    "filter.v_max",
    "filter.max_gap_s",
    "filter.vote_window",
    "derive.v_land",
    "grid.w",
    "grid.h",
    "grid.x0",
    "grid.y0",
    "grid.x1",
    "grid.y1",
    "smooth.sigma",
    "smooth.landing_sigma",
    "hotspot.threshold_frac",
    "hotspot.erode_n",
    "hotspot.dilate_n",
    "hotspot.min_area",
    "boring.overlap_frac",
};

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

void PipelineConfig::sync_periods() {
  const double period = 1.0 / sample_rate.to_double();
  segment.sample_period_s = period;
  filter.sample_period_s = period;
  derive.sample_period_s = period;
}

PipelineConfig PipelineConfig::from_kv(const KeyValueFile& kv, const fs::path& base_dir) {
  kv.reject_unknown(kConfigKeys);
  PipelineConfig c;
  auto num = [&](const char* key, auto& field) {
    using T = std::remove_reference_t<decltype(field)>;
    if (!kv.has(key)) return;
    try {
      if constexpr (std::is_integral_v<T>) {
        field = static_cast<T>(kv.get_int(key));
      } else {
        field = kv.get_double(key);
      }
    } catch (const std::exception&) {
      throw ConfigError(kv.origin() + ": bad value for '" + key + "'");
    }
  };
  if (kv.has("layout")) {
    c.layout = resolve(base_dir, kv.get("layout"));
    if (!fs::exists(c.layout)) throw ConfigError(kv.origin() + ": layout file not found: " + c.layout.string());
  }
  if (kv.has("output_dir")) c.output_dir = resolve(base_dir, kv.get("output_dir"));
  if (kv.has("sample_rate")) {
    try {
      c.sample_rate = Rational::parse(kv.get("sample_rate"));
    } catch (const std::exception&) {
      throw ConfigError(kv.origin() + ": bad value for 'sample_rate'");
    }
    if (!c.sample_rate.positive()) throw ConfigError(kv.origin() + ": sample_rate must be positive");
  }
  num("clahe.tile_px", c.extraction.clahe.tile_px);
  num("clahe.clip_limit", c.extraction.clahe.clip_limit);
  num("extract.min_position_score", c.extraction.min_position_score);
  num("extract.min_icon_score", c.extraction.min_icon_score);
  num("extract.min_counter_score", c.extraction.min_counter_score);
  num("locator.min_coarse_dim", c.extraction.locator.min_coarse_dim);
  num("locator.candidates", c.extraction.locator.candidates);
  num("locator.suppression_px", c.extraction.locator.suppression_px);
  num("locator.refine_radius", c.extraction.locator.refine_radius);
  num("locator.min_survivors", c.extraction.locator.min_survivors);
  num("segment.hysteresis_s", c.segment.hysteresis_s);
  num("segment.min_game_s", c.segment.min_game_s);
  num("filter.v_max", c.filter.v_max);
  num("filter.max_gap_s", c.filter.max_gap_s);
  num("filter.vote_window", c.filter.vote_window);
  num("derive.v_land", c.derive.v_land);
  num("grid.w", c.grid.grid_w);
  num("grid.h", c.grid.grid_h);
  num("grid.x0", c.grid.bounds.x0);
  num("grid.y0", c.grid.bounds.y0);
  num("grid.x1", c.grid.bounds.x1);
  num("grid.y1", c.grid.bounds.y1);
  num("smooth.sigma", c.smooth_sigma);
  num("smooth.landing_sigma", c.landing_sigma);
  num("hotspot.threshold_frac", c.hotspots.threshold_frac);
  num("hotspot.erode_n", c.hotspots.erode_n);
  num("hotspot.dilate_n", c.hotspots.dilate_n);
  num("hotspot.min_area", c.hotspots.min_area);
  num("boring.overlap_frac", c.boring_overlap);

  const std::string o = kv.origin() + ": ";
  if (c.extraction.clahe.tile_px < 2) throw ConfigError(o + "clahe.tile_px must be >= 2");
  if (c.extraction.locator.min_coarse_dim < 4 || c.extraction.locator.candidates < 1) {
    throw ConfigError(o + "bad locator parameters");
  }
  if (c.segment.hysteresis_s < 0 || c.segment.min_game_s < 0) throw ConfigError(o + "bad segmentation parameters");
  if (!(c.filter.v_max > 0) || c.filter.max_gap_s < 0 || c.filter.vote_window < 1) {
    throw ConfigError(o + "bad filter parameters");
  }
  if (c.grid.grid_w < 1 || c.grid.grid_h < 1 || !(c.grid.bounds.x1 > c.grid.bounds.x0) ||
      !(c.grid.bounds.y1 > c.grid.bounds.y0)) {
    throw ConfigError(o + "bad grid geometry");
  }
  if (c.smooth_sigma < 0 || c.landing_sigma < 0) throw ConfigError(o + "smoothing sigma must be >= 0");
  const auto& h = c.hotspots;
  if (!(h.threshold_frac > 0 && h.threshold_frac <= 1) || h.erode_n < 0 || h.dilate_n < 0 || h.min_area < 1) {
    throw ConfigError(o + "bad hotspot parameters");
  }
  if (!(c.boring_overlap > 0 && c.boring_overlap <= 1)) throw ConfigError(o + "boring.overlap_frac must lie in (0, 1]");
  c.sync_periods();
  return c;
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
  if (!fs::exists(path)) throw InputError("config file not found: " + path.string());
  return from_kv(KeyValueFile::load(path), path.parent_path());
}

std::string format_config(const PipelineConfig& c) {
  std::ostringstream o;
  o << "layout=" << c.layout.string() << "\n"
    << "sample_rate=" << c.sample_rate.str() << "\n"
    << "clahe.tile_px=" << c.extraction.clahe.tile_px << "\n"
    << "clahe.clip_limit=" << c.extraction.clahe.clip_limit << "\n"
    << "extract.min_position_score=" << c.extraction.min_position_score << "\n"
    << "extract.min_icon_score=" << c.extraction.min_icon_score << "\n"
    << "extract.min_counter_score=" << c.extraction.min_counter_score << "\n"
    << "segment.hysteresis_s=" << c.segment.hysteresis_s << "\n"
    << "segment.min_game_s=" << c.segment.min_game_s << "\n"
    << "filter.v_max=" << c.filter.v_max << "\n"
    << "filter.max_gap_s=" << c.filter.max_gap_s << "\n"
    << "filter.vote_window=" << c.filter.vote_window << "\n"
    << "derive.v_land=" << c.derive.v_land << "\n"
    << "grid.w=" << c.grid.grid_w << "\n"
    << "grid.h=" << c.grid.grid_h << "\n"
    << "smooth.sigma=" << c.smooth_sigma << "\n"
    << "smooth.landing_sigma=" << c.landing_sigma << "\n"
    << "hotspot.threshold_frac=" << c.hotspots.threshold_frac << "\n"
    << "hotspot.erode_n=" << c.hotspots.erode_n << "\n"
    << "hotspot.dilate_n=" << c.hotspots.dilate_n << "\n"
    << "hotspot.min_area=" << c.hotspots.min_area << "\n"
    << "boring.overlap_frac=" << c.boring_overlap << "\n";
  return o.str();
}

std::vector<Track> tracks_from_samples(const std::vector<FrameSample>& samples, const std::string& source_id,
                                       const PipelineConfig& cfg) {
  std::vector<Track> tracks;
  for (const auto& span : segment_games(samples, source_id, cfg.segment)) {
    tracks.push_back(filter_track(samples_in_span(samples, span), span, cfg.filter));
  }
  return tracks;
}

ExtractOutcome extract_stream(std::unique_ptr<FrameStream> stream, const ExtractionContext& ctx,
                              const PipelineConfig& cfg) {
  ExtractOutcome out;
  out.source_id = stream->source_id();
  auto sampled = sample_at_rate(std::move(stream), cfg.sample_rate);
  while (auto frame = sampled->next()) {
    ++out.frames;
    try {
      out.samples.push_back(extract_sample(*frame, ctx));
    } catch (const InputError&) {
      throw;
    } catch (const std::exception& e) {
      ++out.failed_frames;
      log_warn(out.source_id + ": frame " + std::to_string(frame->index) + " skipped: " + e.what());
    }
  }
  out.tracks = tracks_from_samples(out.samples, out.source_id, cfg);
  return out;
}

std::vector<std::string> expand_sources(const std::vector<std::string>& inputs) {
  std::vector<std::string> out;
  for (const auto& in : inputs) {
    const fs::path p(in);
    const bool is_source =
        in == "-" || !fs::is_directory(p) || fs::exists(p / "stream.meta") || fs::exists(p / frame_file_name(0));
    if (is_source) {
      out.push_back(in);
      continue;
    }
    const fs::path root = fs::is_directory(p / "games") ? p / "games" : p;
    std::vector<std::string> found;
    for (const auto& e : fs::directory_iterator(root)) {
      if (e.is_directory() && (fs::exists(e.path() / "stream.meta") || fs::exists(e.path() / frame_file_name(0)))) {
        found.push_back(e.path().string());
      }
    }
    if (found.empty()) {
      out.push_back(in);  // let the frame source report the problem
      continue;
    }
    std::sort(found.begin(), found.end());
    out.insert(out.end(), found.begin(), found.end());
  }
  return out;
}

std::vector<GameRecord> derive_all(const std::vector<Track>& tracks, const std::map<std::string, PlayerClass>& classes,
                                   const PipelineConfig& cfg) {
  std::vector<GameRecord> records;
  std::set<std::string> seen;
  for (const auto& t : tracks) {
    if (!seen.insert(t.span.game_id).second) throw InvariantError("duplicate game_id " + t.span.game_id);
    const auto it = classes.find(t.span.game_id);
    const PlayerClass cls = it == classes.end() ? PlayerClass::Experienced : it->second;
    try {
      records.push_back(derive_record(t, t.span, cls, cfg.derive));
    } catch (const AggregationFailed& e) {
      log_warn(t.span.game_id + ": " + e.what());
    }
  }
  return records;
}

std::map<std::string, PlayerClass> load_classes(const fs::path& manifest) {
  if (!fs::exists(manifest)) throw InputError("class manifest not found: " + manifest.string());
  std::map<std::string, PlayerClass> out;
  for (const auto& r : read_manifest(manifest)) out[r.game_id] = r.player_class;
  return out;
}

std::vector<TimedSample> select_points(const HeatmapSelection& sel, const std::vector<RecordRow>& records,
                                       const std::vector<TraceRow>& traces, const std::vector<KillRow>& kills) {
  std::map<std::string, const RecordRow*> chosen;
  for (const auto& r : records) {
    if (!sel.player_class || r.player_class == *sel.player_class) chosen[r.game_id] = &r;
  }
  std::vector<TimedSample> out;
  switch (sel.kind) {
    case GridKind::Landing:
      for (const auto& r : records) {
        if (chosen.count(r.game_id) && r.landing) out.push_back({r.landing->x, r.landing->y, 0.0});
      }
      break;
    case GridKind::Activity:
      for (const auto& t : traces) {
        const auto it = chosen.find(t.game_id);
        if (it != chosen.end()) out.push_back({t.x, t.y, t.t_s - it->second->start_s});
      }
      break;
    case GridKind::Killing:
      for (const auto& k : kills) {
        const auto it = chosen.find(k.game_id);
        if (it != chosen.end()) out.push_back({k.x, k.y, k.t_s - it->second->start_s});
      }
      break;
  }
  return out;
}

HeatGrid build_grid(const std::vector<TimedSample>& points, GridKind kind, const PipelineConfig& cfg, unsigned jobs) {
  GridSpec spec = cfg.grid;
  spec.kind = kind;
  std::vector<Point2> pts;
  pts.reserve(points.size());
  for (const auto& p : points) pts.push_back({p.x, p.y});
  const HeatGrid raw = accumulate_parallel(pts, spec, jobs);
  return smooth(raw, kind == GridKind::Landing ? cfg.landing_sigma : cfg.smooth_sigma);
}

}  // namespace hudtrace
