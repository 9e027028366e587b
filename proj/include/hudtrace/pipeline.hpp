#pragma once

// Stage drivers shared by the command line tool and the integration tests:
// configuration, per-source extraction, derivation, heat maps, hotspots and
// the correlation report.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hudtrace/core/kv.hpp"
#include "hudtrace/derive.hpp"
#include "hudtrace/maps.hpp"
#include "hudtrace/stats.hpp"
#include "hudtrace/telemetry.hpp"

namespace hudtrace {

struct PipelineConfig {
  std::filesystem::path layout;  // HUD layout file (names the atlases and map)
  Rational sample_rate = Rational(1);
  ExtractionParams extraction;
  SegmentParams segment;
  FilterParams filter;
  DeriveParams derive;
  GridSpec grid{512, 512, {0, 0, 2048, 2048}, GridKind::Activity};
  double smooth_sigma = 2.0;
  double landing_sigma = 8.0;  // landing grids hold one point per game
  HotSpotParams hotspots;
  double boring_overlap = 0.1;
  std::filesystem::path output_dir = "out";

  // Unknown keys raise ConfigError naming the key; referenced files must exist.
  static PipelineConfig load(const std::filesystem::path& path);
  static PipelineConfig from_kv(const KeyValueFile& kv, const std::filesystem::path& base_dir);
  // Sample period implied by the rate, used by segmentation, filtering and derivation.
  void sync_periods();
};

std::string format_config(const PipelineConfig& cfg);

struct ExtractOutcome {
  std::string source_id;
  std::int64_t frames = 0;
  std::int64_t failed_frames = 0;
  std::vector<FrameSample> samples;
  std::vector<Track> tracks;
};

// Samples the stream, extracts every frame (per-frame failures are logged and
// skipped), segments games and filters each track.
ExtractOutcome extract_stream(std::unique_ptr<FrameStream> stream, const ExtractionContext& ctx, const PipelineConfig& cfg);
std::vector<Track> tracks_from_samples(const std::vector<FrameSample>& samples, const std::string& source_id,
                                       const PipelineConfig& cfg);

// Expands corpus roots (directories whose sub-directories are frame sources)
// into a sorted source list.
std::vector<std::string> expand_sources(const std::vector<std::string>& inputs);

// Records in input order; throws InvariantError on duplicate game ids.
std::vector<GameRecord> derive_all(const std::vector<Track>& tracks,
                                   const std::map<std::string, PlayerClass>& classes, const PipelineConfig& cfg);
// game_id -> class from a corpus manifest.
std::map<std::string, PlayerClass> load_classes(const std::filesystem::path& manifest);

struct HeatmapSelection {
  GridKind kind = GridKind::Activity;
  std::optional<PlayerClass> player_class;
};

// Points for the selected kind: trace positions (activity), landing spots
// (landing) or killing positions (killing), each with game-relative time.
std::vector<TimedSample> select_points(const HeatmapSelection& sel, const std::vector<RecordRow>& records,
                                       const std::vector<TraceRow>& traces, const std::vector<KillRow>& kills);
HeatGrid build_grid(const std::vector<TimedSample>& points, GridKind kind, const PipelineConfig& cfg,
                    unsigned jobs = 1);

}  // namespace hudtrace
