#pragma once

// Per-game calculated values: landing spot, movement trace, death / win
// position, final place, active player progression, game span, phase
// durations, total kills and killing positions.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hudtrace/core/geometry.hpp"
#include "hudtrace/telemetry.hpp"

namespace hudtrace {

enum class PlayerClass { Beginner, Experienced };
std::string_view class_name(PlayerClass c) noexcept;
std::optional<PlayerClass> parse_class(std::string_view s) noexcept;

struct TimedPoint {
  double x = 0, y = 0, t_s = 0;
};

struct KillPositions {
  std::vector<TimedPoint> entries;
  int dropped = 0;  // increments seen at samples without a position
};

struct DeriveParams {
  double v_land = 10;  // map px / s
  double sample_period_s = 1;
};

class AggregationFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Returns nullopt when no positioned sample follows the jump (LandingUndetermined).
std::optional<Point2> derive_landing_spot(const Track& track, const DeriveParams& params = {});
// True when the last player-count reading is 1.
bool derive_won(const Track& track);
// nullopt when the track has no player-count reading (PlaceUndetermined).
std::optional<int> derive_final_place(const Track& track);
KillPositions derive_killing_positions(const Track& track);
std::map<Phase, double> derive_phase_durations(const Track& track, const DeriveParams& params = {});

enum RecordFlag : unsigned {
  kLandingUndetermined = 1u << 0,
  kPlaceUndetermined = 1u << 1,
  kEndPositionUndetermined = 1u << 2,
};

struct PlayerCount {
  double t_s = 0;
  int players = 0;
};

struct GameRecord {
  std::string game_id;
  PlayerClass player_class = PlayerClass::Experienced;
  GameSpan span;
  Track track;
  std::optional<Point2> landing_spot;
  std::vector<TimedPoint> movement_trace;
  std::optional<Point2> death_position;
  std::optional<Point2> win_position;
  std::optional<int> final_place;
  int total_kills = 0;
  KillPositions killing_positions;
  std::vector<PlayerCount> player_progression;
  std::map<Phase, double> phase_durations;
  double game_duration_s = 0;
  unsigned flags = 0;

  [[nodiscard]] double phase_seconds(Phase p) const;
};

// Throws AggregationFailed on an empty track.
GameRecord derive_record(const Track& track, const GameSpan& span, PlayerClass player_class,
                         const DeriveParams& params = {});

extern const std::vector<std::string> kRecordsHeader;
extern const std::vector<std::string> kKillsHeader;
extern const std::vector<std::string> kTracesHeader;
extern const std::vector<std::string> kProgressionHeader;

void write_records_csv(std::ostream& out, const std::vector<GameRecord>& records);
void write_kills_csv(std::ostream& out, const std::vector<GameRecord>& records);
void write_traces_csv(std::ostream& out, const std::vector<GameRecord>& records);
// Active player progression: the first reading of each game and every change.
void write_progression_csv(std::ostream& out, const std::vector<GameRecord>& records);

// Flat row of the records CSV, as read back by later stages.
struct RecordRow {
  std::string game_id;
  PlayerClass player_class = PlayerClass::Experienced;
  double start_s = 0, end_s = 0, duration_s = 0;
  std::optional<int> place;
  int kills = 0;
  std::optional<Point2> landing, death, win;
  double jump_s = 0, brew_s = 0, contract_s = 0;
  int dropped_kills = 0;
};

struct KillRow {
  std::string game_id;
  double t_s = 0, x = 0, y = 0;
};

struct TraceRow {
  std::string game_id;
  double t_s = 0, x = 0, y = 0;
  std::uint8_t flags = 0;
};

RecordRow to_row(const GameRecord& r);
std::vector<RecordRow> read_records_csv(const std::filesystem::path& path);
std::vector<KillRow> read_kills_csv(const std::filesystem::path& path);
std::vector<TraceRow> read_traces_csv(const std::filesystem::path& path);

}  // namespace hudtrace
