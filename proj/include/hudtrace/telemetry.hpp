#pragma once

// Frame -> FrameSample extraction, stream segmentation into games, and track
// cleaning (counter monotonicity, speed gating, short-gap interpolation).

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hudtrace/core/phase.hpp"
#include "hudtrace/ingest.hpp"
#include "hudtrace/vision.hpp"

namespace hudtrace {

inline constexpr int kMaxPlayers = 100;
inline constexpr int kMaxKills = 99;

struct MapPosition {
  double x = 0;
  double y = 0;
  double score = 0;
};

enum SampleFlag : std::uint8_t {
  kFlagRaw = 0,
  kFlagInterpolated = 1,
  kFlagRejected = 2,
};

struct FrameSample {
  double t_s = 0;
  Phase phase = Phase::Unknown;
  double phase_score = 0;
  std::optional<MapPosition> pos;
  std::optional<int> players;
  std::optional<int> kills;
  double players_score = 0;
  double kills_score = 0;
  std::uint8_t flags = kFlagRaw;
};

std::string flag_name(std::uint8_t flags);
std::uint8_t parse_flag(const std::string& s);

struct ExtractionParams {
  ClaheParams clahe;
  double min_position_score = 0.5;
  double min_icon_score = 0.55;
  double min_counter_score = 0.6;
  LocatorParams locator;
};

// Everything extract_sample needs that is shared between frames: the layout,
// both atlases and the preprocessed map index. Immutable after construction.
class ExtractionContext {
 public:
  ExtractionContext(HudLayout layout, GlyphAtlas glyphs, PhaseAtlas phases, const RgbImage& map,
                    ExtractionParams params = {});

  // Loads atlases and map named by the layout.
  static std::shared_ptr<const ExtractionContext> load(const HudLayout& layout,
                                                       ExtractionParams params = {});

  [[nodiscard]] const HudLayout& layout() const noexcept { return layout_; }
  [[nodiscard]] const GlyphAtlas& glyphs() const noexcept { return glyphs_; }
  [[nodiscard]] const PhaseAtlas& phases() const noexcept { return phases_; }
  [[nodiscard]] const MapLocator& locator() const noexcept { return *locator_; }
  [[nodiscard]] const ExtractionParams& params() const noexcept { return params_; }
  [[nodiscard]] int map_width() const noexcept { return map_width_; }
  [[nodiscard]] int map_height() const noexcept { return map_height_; }

 private:
  HudLayout layout_;
  GlyphAtlas glyphs_;
  PhaseAtlas phases_;
  ExtractionParams params_;
  std::unique_ptr<MapLocator> locator_;
  int map_width_ = 0;
  int map_height_ = 0;
};

// Pure per-frame extraction; any field below its score threshold is left absent.
FrameSample extract_sample(const Frame& frame, const ExtractionContext& ctx);

// Minimap-only localization (exposed for tests): returns the matched player
// position in map pixels and its score, or nullopt below threshold.
std::optional<MapPosition> locate_player(const RgbImage& minimap_crop, const ExtractionContext& ctx);

struct GameSpan {
  std::string game_id;
  double start_t_s = 0;
  double end_t_s = 0;  // exclusive
  [[nodiscard]] double duration() const noexcept { return end_t_s - start_t_s; }
};

struct SegmentParams {
  double hysteresis_s = 10;   // Lobby/Unknown run that separates games
  double min_game_s = 60;     // shorter spans are false starts
  double sample_period_s = 1;
};

std::vector<GameSpan> segment_games(const std::vector<FrameSample>& samples,
                                    const std::string& source_id, const SegmentParams& params = {});

std::string make_game_id(const std::string& source_id, int ordinal);

struct Track {
  GameSpan span;
  std::vector<FrameSample> samples;
};

struct FilterParams {
  double v_max = 40;      // map px / s, not applied during Jump
  double max_gap_s = 5;   // longest positional hole that is interpolated
  int vote_window = 5;    // samples considered by the counter majority vote
  double sample_period_s = 1;
};

// Samples whose t_s falls inside the span.
std::vector<FrameSample> samples_in_span(const std::vector<FrameSample>& samples, const GameSpan& span);

Track filter_track(const std::vector<FrameSample>& samples, const GameSpan& span,
                   const FilterParams& params = {});

// Telemetry CSV: game_id,t_s,phase,x,y,pos_score,players,kills,flag
extern const std::vector<std::string> kTelemetryHeader;
void write_telemetry_csv(std::ostream& out, const std::vector<Track>& tracks);
// Groups rows by game_id in first-appearance order; spans are rebuilt from the
// first and last sample (end = last + sample period).
std::vector<Track> read_telemetry_csv(const std::filesystem::path& path, double sample_period_s = 1.0);

}  // namespace hudtrace
