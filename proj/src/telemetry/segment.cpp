#include <cmath>
#include <cstdio>
#include <limits>

#include "hudtrace/telemetry.hpp"

namespace hudtrace {

std::string make_game_id(const std::string& source_id, int ordinal) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "-g%02d", ordinal);
  return source_id + buf;
}

std::vector<GameSpan> segment_games(const std::vector<FrameSample>& samples,
                                    const std::string& source_id, const SegmentParams& params) {
  constexpr double kNone = std::numeric_limits<double>::quiet_NaN();
  constexpr double kStreamStart = -std::numeric_limits<double>::infinity();
  std::vector<GameSpan> spans;

  // Start time of the current Lobby/Unknown run; NaN when no qualifying run is
  // open. The run preceding the first sample counts as arbitrarily long.
  double run_start = kStreamStart;
  bool playing = false;
  double game_start = 0, last_in_game = 0, run_before_game = kNone;

  auto close_game = [&] {
    playing = false;
    const double end = last_in_game + params.sample_period_s;
    if (end - game_start >= params.min_game_s) {
      spans.push_back({make_game_id(source_id, static_cast<int>(spans.size()) + 1), game_start, end});
    } else {
      // False start: its samples join the surrounding non-game run.
      run_start = run_before_game;
    }
  };

  for (const auto& s : samples) {
    const double t = s.t_s;
    if (!in_game(s.phase)) {
      if (std::isnan(run_start)) run_start = t;
      continue;
    }
    if (playing) {
      if (!std::isnan(run_start) && t - run_start >= params.hysteresis_s) {
        close_game();
      } else {
        last_in_game = t;
        run_start = kNone;
        continue;
      }
    }
    // Not in a game: only a Jump after a long enough non-game run starts one.
    if (s.phase == Phase::Jump && !std::isnan(run_start) && t - run_start >= params.hysteresis_s) {
      playing = true;
      game_start = t;
      last_in_game = t;
      run_before_game = run_start;
      run_start = kNone;
    } else {
      run_start = kNone;
    }
  }
  if (playing) close_game();
  return spans;
}

}  // namespace hudtrace
