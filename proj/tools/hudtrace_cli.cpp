// hudtrace: command line front end for the extraction and analysis pipeline.
//
// Exit codes: 0 success, 2 missing input, 3 bad configuration or usage,
// 4 internal invariant violation. Logs go to stderr; stdout carries only the
// correlation report text.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "hudtrace/core/csv.hpp"
#include "hudtrace/core/error.hpp"
#include "hudtrace/core/log.hpp"
#include "hudtrace/core/parallel.hpp"
#include "hudtrace/core/png_io.hpp"
#include "hudtrace/pipeline.hpp"
#include "hudtrace/synth.hpp"

namespace fs = std::filesystem;
using namespace hudtrace;

namespace {

struct Globals {
  std::string config;
  unsigned jobs = 1;
  std::string out;
};

PipelineConfig load_config(const Globals& g) {
  PipelineConfig cfg = g.config.empty() ? PipelineConfig{} : PipelineConfig::load(g.config);
  if (!g.out.empty()) cfg.output_dir = g.out;
  cfg.sync_periods();
  fs::create_directories(cfg.output_dir);
  return cfg;
}

template <typename Fn>
std::string to_text(Fn&& write) {
  std::ostringstream o;
  write(o);
  return o.str();
}

std::vector<Track> read_all_telemetry(const std::vector<std::string>& files, const PipelineConfig& cfg) {
  std::vector<Track> tracks;
  for (const auto& f : files) {
    if (!fs::exists(f)) throw InputError("telemetry file not found: " + f);
    auto t = read_telemetry_csv(f, cfg.segment.sample_period_s);
    tracks.insert(tracks.end(), std::make_move_iterator(t.begin()), std::make_move_iterator(t.end()));
  }
  return tracks;
}

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw InputError(std::string(what) + " not given");
  if (!fs::exists(path)) throw InputError(std::string(what) + " not found: " + path);
}

// ---- stages ---------------------------------------------------------------

std::vector<fs::path> run_extract(const std::vector<std::string>& inputs, const std::string& fps,
                                  const PipelineConfig& cfg, unsigned jobs) {
  if (cfg.layout.empty()) throw ConfigError("no HUD layout given (use --layout or layout= in the config)");
  if (!fs::exists(cfg.layout)) throw InputError("layout file not found: " + cfg.layout.string());
  const HudLayout layout = load_hud_layout(cfg.layout);
  const auto ctx = ExtractionContext::load(layout, cfg.extraction);
  std::optional<Rational> rate;
  if (!fps.empty()) {
    try {
      rate = Rational::parse(fps);
    } catch (const std::exception&) {
      throw ConfigError("bad --fps value '" + fps + "'");
    }
  }
  const auto sources = expand_sources(inputs);
  // Open everything first so missing inputs fail before any work starts.
  std::vector<std::unique_ptr<FrameStream>> streams;
  for (const auto& s : sources) streams.push_back(open_frame_source(s, rate));
  std::vector<std::string> ids;
  for (const auto& s : streams) {
    if (std::find(ids.begin(), ids.end(), s->source_id()) != ids.end()) {
      throw InvariantError("duplicate source_id " + s->source_id());
    }
    ids.push_back(s->source_id());
  }
  std::vector<fs::path> outputs(streams.size());
  parallel_for(streams.size(), jobs, [&](std::size_t i) {
    const std::string id = ids[i];
    const ExtractOutcome r = extract_stream(std::move(streams[i]), *ctx, cfg);
    if (r.tracks.empty()) log_warn(id + ": no games segmented");
    outputs[i] = cfg.output_dir / (id + ".telemetry.csv");
    write_text_file(outputs[i], to_text([&](std::ostream& o) { write_telemetry_csv(o, r.tracks); }));
    log_info(id + ": " + std::to_string(r.frames) + " frames, " + std::to_string(r.tracks.size()) + " games, " +
             std::to_string(r.failed_frames) + " failed frames");
  });
  return outputs;
}

void run_derive(const std::vector<std::string>& telemetry, const std::string& classes_path,
                const PipelineConfig& cfg) {
  const auto tracks = read_all_telemetry(telemetry, cfg);
  std::map<std::string, PlayerClass> classes;
  if (!classes_path.empty()) classes = load_classes(classes_path);
  const auto records = derive_all(tracks, classes, cfg);
  if (records.empty()) log_warn("no games in the telemetry input; records are empty");
  const auto& d = cfg.output_dir;
  write_text_file(d / "records.csv", to_text([&](std::ostream& o) { write_records_csv(o, records); }));
  write_text_file(d / "traces.csv", to_text([&](std::ostream& o) { write_traces_csv(o, records); }));
  write_text_file(d / "kills.csv", to_text([&](std::ostream& o) { write_kills_csv(o, records); }));
  write_text_file(d / "progression.csv", to_text([&](std::ostream& o) { write_progression_csv(o, records); }));
  log_info("derived " + std::to_string(records.size()) + " game records");
}

struct HeatmapArgs {
  std::string records, traces, kills, kind = "activity", player_class, name, map_image;
  double window = 0;
  double sigma = -1;
};

void save_grid_and_png(const fs::path& stem, const HeatGrid& grid, const RgbImage* background) {
  write_grid(stem.string() + ".pgm", grid);
  write_png(stem.string() + ".png", render(grid, default_palette(), background));
}

// Returns the written PGM paths.
std::vector<fs::path> run_heatmap(const HeatmapArgs& a, PipelineConfig cfg, unsigned jobs) {
  const auto kind = parse_grid_kind(a.kind);
  if (!kind) throw ConfigError("unknown heat map kind '" + a.kind + "'");
  HeatmapSelection sel{*kind, std::nullopt};
  if (!a.player_class.empty()) {
    sel.player_class = parse_class(a.player_class);
    if (!sel.player_class) throw ConfigError("unknown class '" + a.player_class + "'");
  }
  require_file(a.records, "records CSV");
  const auto records = read_records_csv(a.records);
  std::vector<TraceRow> traces;
  std::vector<KillRow> kills;
  if (*kind == GridKind::Activity) {
    require_file(a.traces, "traces CSV");
    traces = read_traces_csv(a.traces);
  }
  if (*kind == GridKind::Killing) {
    require_file(a.kills, "kills CSV");
    kills = read_kills_csv(a.kills);
  }
  if (a.sigma >= 0) (*kind == GridKind::Landing ? cfg.landing_sigma : cfg.smooth_sigma) = a.sigma;
  const auto points = select_points(sel, records, traces, kills);
  if (points.empty()) {
    log_info("empty selection: no matching games for the " + a.kind + " heat map, nothing written");
    return {};
  }
  std::optional<RgbImage> background;
  if (!a.map_image.empty()) {
    require_file(a.map_image, "background map image");
    background = read_png_rgb(a.map_image);
  }
  const RgbImage* bg = background ? &*background : nullptr;
  const std::string stem = a.name.empty() ? a.kind + (a.player_class.empty() ? "" : "_" + a.player_class) : a.name;
  std::vector<fs::path> written;
  if (a.window > 0) {
    GridSpec spec = cfg.grid;
    spec.kind = *kind;
    for (const auto& w : time_sliced(points, a.window, spec)) {
      const fs::path p = cfg.output_dir / (stem + "_w" + std::to_string(w.index));
      save_grid_and_png(p, smooth(w.grid, *kind == GridKind::Landing ? cfg.landing_sigma : cfg.smooth_sigma), bg);
      written.push_back(p.string() + ".pgm");
    }
  } else {
    const fs::path p = cfg.output_dir / stem;
    save_grid_and_png(p, build_grid(points, *kind, cfg, jobs), bg);
    written.push_back(p.string() + ".pgm");
  }
  for (const auto& p : written) log_info("wrote " + p.string());
  return written;
}

struct HotspotArgs {
  std::string grid, killing;
  std::optional<double> threshold;
  std::optional<int> erode, dilate, min_area;
};

fs::path hotspot_csv_for(const PipelineConfig& cfg, const fs::path& grid) {
  return cfg.output_dir / (grid.stem().string() + ".hotspots.csv");
}

HotSpotMap hotspots_for_grid(const fs::path& pgm, const HotSpotParams& params, const PipelineConfig& cfg) {
  const HeatGrid grid = read_grid(pgm);
  const HotSpotMap map = extract_hotspots(grid, params);
  write_hotspots(hotspot_csv_for(cfg, pgm), map);
  RgbImage canvas = render(grid);
  std::vector<int> ids;
  for (const auto& h : map.hotspots) ids.push_back(h.id);
  const std::array<std::uint8_t, 3> colour =
      grid.spec.kind == GridKind::Killing ? std::array<std::uint8_t, 3>{230, 30, 30} : std::array<std::uint8_t, 3>{255, 255, 255};
  paint_hotspots(canvas, map, ids, {colour, 140});
  write_png(cfg.output_dir / (pgm.stem().string() + ".hotspots.png"), canvas);
  log_info(pgm.stem().string() + ": " + std::to_string(map.hotspots.size()) + " hotspots");
  return map;
}

void run_hotspots(const HotspotArgs& a, const PipelineConfig& cfg) {
  require_file(a.grid, "grid PGM");
  HotSpotParams p = cfg.hotspots;
  if (a.threshold) p.threshold_frac = *a.threshold;
  if (a.erode) p.erode_n = *a.erode;
  if (a.dilate) p.dilate_n = *a.dilate;
  if (a.min_area) p.min_area = *a.min_area;
  if (!(p.threshold_frac > 0 && p.threshold_frac <= 1) || p.erode_n < 0 || p.dilate_n < 0 || p.min_area < 1) {
    throw ConfigError("bad hotspot parameters");
  }
  const HotSpotMap activity = hotspots_for_grid(a.grid, p, cfg);
  if (a.killing.empty()) return;
  require_file(a.killing, "killing grid PGM");
  const HotSpotMap killing = hotspots_for_grid(a.killing, p, cfg);
  const auto boring = boring_spots(activity, killing, cfg.boring_overlap);
  std::ostringstream o;
  CsvWriter w(o);
  w.row({"id", "area", "cx", "cy"});
  for (int id : boring) {
    const auto& h = activity.hotspots[static_cast<std::size_t>(id - 1)];
    w.row({std::to_string(id), std::to_string(h.area_cells), fmt_fixed(h.centroid.x, 3), fmt_fixed(h.centroid.y, 3)});
  }
  write_text_file(cfg.output_dir / "boring.csv", o.str());
  RgbImage canvas = render(read_grid(a.grid));
  std::vector<int> kill_ids;
  for (const auto& h : killing.hotspots) kill_ids.push_back(h.id);
  paint_hotspots(canvas, killing, kill_ids, {{230, 30, 30}, 170});
  paint_hotspots(canvas, activity, boring, {{40, 90, 255}, 170});
  write_png(cfg.output_dir / "boring.png", canvas);
  log_info(std::to_string(boring.size()) + " of " + std::to_string(activity.hotspots.size()) +
           " activity hotspots are boring spots");
}

struct CorrelateArgs {
  std::string records, survey, landing, activity, pairs;
  bool permutation = false;
};

void run_correlate(const CorrelateArgs& a, const PipelineConfig& cfg, unsigned jobs) {
  require_file(a.records, "records CSV");
  const auto records = read_records_csv(a.records);
  std::optional<std::vector<SurveyRow>> survey;
  if (!a.survey.empty()) {
    require_file(a.survey, "survey CSV");
    survey = read_survey_csv(a.survey);
  }
  std::optional<HotSpotMap> landing, activity;
  if (!a.landing.empty()) {
    require_file(a.landing, "landing hotspot CSV");
    landing = read_hotspots(a.landing);
  }
  if (!a.activity.empty()) {
    require_file(a.activity, "activity hotspot CSV");
    activity = read_hotspots(a.activity);
  }
  const AnalysisTable table = join_survey(records, survey ? &*survey : nullptr,
                                          {landing ? &*landing : nullptr, activity ? &*activity : nullptr});
  const auto pairs = a.pairs.empty() ? default_pairs(table) : parse_pairs(a.pairs);
  HypothesisReport report = hypothesis_report(table, pairs, jobs);
  if (a.permutation) {
    for (auto& e : report.entries) {
      if (!e.result || e.result->n > 10) continue;
      const auto& xs = table.values[*table.find(e.pair.x)];
      const auto& ys = table.values[*table.find(e.pair.y)];
      std::vector<double> x, y;
      for (std::size_t k = 0; k < xs.size(); ++k) {
        if (std::isnan(xs[k]) || std::isnan(ys[k])) continue;
        x.push_back(xs[k]);
        y.push_back(ys[k]);
      }
      e.result->p = spearman_permutation_p(x, y);
    }
  }
  const std::string text = format_report_text(report);
  write_text_file(cfg.output_dir / "report.txt", text);
  write_text_file(cfg.output_dir / "report.csv", format_report_csv(report));
  std::cout << text;
}

struct ReportArgs {
  std::vector<std::string> inputs;
  std::string survey, classes, fps;
};

void run_report(const ReportArgs& a, PipelineConfig cfg, unsigned jobs) {
  // A single corpus root supplies its own layout and class manifest.
  std::string classes = a.classes;
  if (a.inputs.size() == 1) {
    const fs::path root(a.inputs[0]);
    if (cfg.layout.empty() && fs::exists(root / "assets" / "layout.txt")) cfg.layout = root / "assets" / "layout.txt";
    if (classes.empty() && fs::exists(root / "manifest.csv")) classes = (root / "manifest.csv").string();
  }
  const fs::path out = cfg.output_dir;
  PipelineConfig tel = cfg;
  tel.output_dir = out / "telemetry";
  fs::create_directories(tel.output_dir);
  std::vector<std::string> telemetry;
  for (const auto& p : run_extract(a.inputs, a.fps, tel, jobs)) telemetry.push_back(p.string());
  run_derive(telemetry, classes, cfg);

  HeatmapArgs h;
  h.records = (out / "records.csv").string();
  h.traces = (out / "traces.csv").string();
  h.kills = (out / "kills.csv").string();
  std::map<std::string, fs::path> grids;
  for (const char* kind : {"activity", "killing", "landing"}) {
    h.kind = kind;
    const auto w = run_heatmap(h, cfg, jobs);
    if (!w.empty()) grids[kind] = w.front();
  }
  for (const char* cls : {"beginner", "experienced"}) {
    h.kind = "landing";
    h.player_class = cls;
    run_heatmap(h, cfg, jobs);
  }

  if (grids.count("activity")) {
    HotspotArgs hs;
    hs.grid = grids["activity"].string();
    if (grids.count("killing")) hs.killing = grids["killing"].string();
    run_hotspots(hs, cfg);
  }
  if (grids.count("landing")) hotspots_for_grid(grids["landing"], cfg.hotspots, cfg);

  CorrelateArgs c;
  c.records = h.records;
  c.survey = a.survey;
  if (grids.count("landing")) c.landing = hotspot_csv_for(cfg, grids["landing"]).string();
  if (grids.count("activity")) c.activity = hotspot_csv_for(cfg, grids["activity"]).string();
  run_correlate(c, cfg, jobs);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hudtrace: battle-royale stream telemetry extraction and analysis"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "pipeline configuration file (key=value)");
  app.add_option("--jobs", g.jobs, "worker threads; outputs do not depend on it")->check(CLI::Range(1u, 256u));
  app.add_option("--out", g.out, "output directory (overrides output_dir)");
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "debug, info, warn or error");

  // synth
  auto* synth = app.add_subcommand("synth", "render a synthetic ground-truth corpus");
  CorpusParams cp;
  synth->add_option("--games", cp.n_games, "number of games")->check(CLI::PositiveNumber);
  synth->add_option("--seed", cp.base_seed, "base seed");
  synth->add_option("--beginner-fraction", cp.beginner_fraction, "share of beginner games")->check(CLI::Range(0.0, 1.0));
  synth->add_option("--hotspot-share", cp.hotspot_share, "experienced players landing on hot sites")
      ->check(CLI::Range(0.0, 1.0));
  synth->add_option("--noise", cp.render.noise_sigma, "additive Gaussian noise sigma")->check(CLI::NonNegativeNumber);
  synth->add_option("--occlusion", cp.render.occlusion_rate, "share of in-game frames with a covered minimap")
      ->check(CLI::Range(0.0, 1.0));
  synth->add_option("--noise-seed", cp.render.noise_seed, "noise seed");
  synth->add_option("--min-duration", cp.scenario.min_duration_s, "shortest game in seconds");
  synth->add_option("--max-duration", cp.scenario.max_duration_s, "longest game in seconds");
  synth->add_option("--map-seed", cp.world.seed, "map texture seed");

  // extract
  auto* extract = app.add_subcommand("extract", "extract telemetry from frame sources");
  std::vector<std::string> sources;
  std::string layout, fps;
  extract->add_option("sources", sources, "frame directories, FRAMES/1 files, corpus roots or -")->required();
  extract->add_option("--layout", layout, "HUD layout file");
  extract->add_option("--fps", fps, "frame rate for directories without stream.meta (e.g. 30000/1001)");

  // derive
  auto* derive = app.add_subcommand("derive", "derive per-game records from telemetry CSVs");
  std::vector<std::string> telemetry;
  std::string classes;
  derive->add_option("telemetry", telemetry, "telemetry CSV files")->required();
  derive->add_option("--classes", classes, "manifest CSV mapping game_id to class (default experienced)");

  // heatmap
  auto* heatmap = app.add_subcommand("heatmap", "accumulate a heat grid (PGM + PNG)");
  HeatmapArgs ha;
  heatmap->add_option("--records", ha.records, "records CSV")->required();
  heatmap->add_option("--traces", ha.traces, "traces CSV (activity)");
  heatmap->add_option("--kills", ha.kills, "kills CSV (killing)");
  heatmap->add_option("--kind", ha.kind, "activity, landing or killing");
  heatmap->add_option("--class", ha.player_class, "beginner or experienced");
  heatmap->add_option("--window", ha.window, "time window in seconds; one grid per non-empty window")
      ->check(CLI::PositiveNumber);
  heatmap->add_option("--name", ha.name, "output file stem");
  heatmap->add_option("--background", ha.map_image, "map image to draw the heat map on");
  heatmap->add_option("--sigma", ha.sigma, "smoothing sigma in cells (overrides the config)");

  // hotspots
  auto* hotspots = app.add_subcommand("hotspots", "extract hotspots from a grid (and boring spots)");
  HotspotArgs hs;
  hotspots->add_option("grid", hs.grid, "grid PGM (activity, landing or killing)")->required();
  hotspots->add_option("--killing", hs.killing, "killing grid PGM; enables boring-spot output");
  hotspots->add_option("--threshold", hs.threshold, "binarization threshold as a fraction of the maximum");
  hotspots->add_option("--erode", hs.erode, "erosion passes");
  hotspots->add_option("--dilate", hs.dilate, "dilation passes");
  hotspots->add_option("--min-area", hs.min_area, "smallest kept component in cells");

  // correlate
  auto* correlate = app.add_subcommand("correlate", "Spearman hypothesis report");
  CorrelateArgs ca;
  correlate->add_option("--records", ca.records, "records CSV")->required();
  correlate->add_option("--survey", ca.survey, "survey CSV");
  correlate->add_option("--landing-hotspots", ca.landing, "landing hotspot CSV");
  correlate->add_option("--activity-hotspots", ca.activity, "activity hotspot CSV");
  correlate->add_option("--pairs", ca.pairs, "metric pairs x:y,x:y (default: hypothesis pairs present)");
  correlate->add_flag("--permutation", ca.permutation, "exact permutation p-values for n <= 10");

  // report
  auto* report = app.add_subcommand("report", "run extract, derive, heatmap, hotspots and correlate");
  ReportArgs ra;
  report->add_option("inputs", ra.inputs, "corpus root or frame sources")->required();
  report->add_option("--survey", ra.survey, "survey CSV");
  report->add_option("--classes", ra.classes, "class manifest (default <corpus>/manifest.csv)");
  report->add_option("--layout", layout, "HUD layout file");
  report->add_option("--fps", ra.fps, "frame rate for directories without stream.meta");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorKind::BadConfig);
  }

  try {
    const std::map<std::string, LogLevel> levels = {
        {"debug", LogLevel::Debug}, {"info", LogLevel::Info}, {"warn", LogLevel::Warn}, {"error", LogLevel::Error}};
    if (!levels.count(log_level)) throw ConfigError("unknown log level '" + log_level + "'");
    set_log_level(levels.at(log_level));

    if (synth->parsed()) {
      if (g.out.empty() && g.config.empty()) throw ConfigError("synth needs --out");
      const PipelineConfig cfg = load_config(g);
      emit_corpus(cfg.output_dir, cp, g.jobs);
      write_text_file(cfg.output_dir / "pipeline.conf", "layout=assets/layout.txt\n");
      return 0;
    }
    PipelineConfig cfg = load_config(g);
    if (!layout.empty()) cfg.layout = layout;
    if (extract->parsed()) {
      run_extract(sources, fps, cfg, g.jobs);
    } else if (derive->parsed()) {
      run_derive(telemetry, classes, cfg);
    } else if (heatmap->parsed()) {
      run_heatmap(ha, cfg, g.jobs);
    } else if (hotspots->parsed()) {
      run_hotspots(hs, cfg);
    } else if (correlate->parsed()) {
      run_correlate(ca, cfg, g.jobs);
    } else if (report->parsed()) {
      run_report(ra, cfg, g.jobs);
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "hudtrace: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "hudtrace: internal error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::Invariant);
  }
}
