#include "hudtrace/derive.hpp"

#include <cmath>
#include <ostream>

#include "hudtrace/core/csv.hpp"
#include "hudtrace/core/error.hpp"
#include "hudtrace/core/kv.hpp"

namespace hudtrace {

std::string_view class_name(PlayerClass c) noexcept {
  return c == PlayerClass::Beginner ? "beginner" : "experienced";
}

std::optional<PlayerClass> parse_class(std::string_view s) noexcept {
  if (s == "beginner" || s == "Beginner") return PlayerClass::Beginner;
  if (s == "experienced" || s == "Experienced") return PlayerClass::Experienced;
  return std::nullopt;
}

namespace {

double dist(const MapPosition& a, const MapPosition& b) { return std::hypot(b.x - a.x, b.y - a.y); }

// Index of the first StormBrewing/Contraction sample after a Jump sample, or 0
// when the track never shows the jump.
std::size_t jump_exit(const std::vector<FrameSample>& s) {
  bool jumped = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i].phase == Phase::Jump) jumped = true;
    else if (jumped && (s[i].phase == Phase::StormBrewing || s[i].phase == Phase::Contraction)) return i;
  }
  return 0;
}

}  // namespace

std::optional<Point2> derive_landing_spot(const Track& track, const DeriveParams& params) {
  const auto& s = track.samples;
  std::vector<std::size_t> fixes;
  for (std::size_t i = jump_exit(s); i < s.size(); ++i) {
    if (s[i].pos) fixes.push_back(i);
  }
  if (fixes.empty()) return std::nullopt;
  auto slow = [&](std::size_t a, std::size_t b) {
    const double dt = s[b].t_s - s[a].t_s;
    return dt > 0 && dist(*s[a].pos, *s[b].pos) / dt <= params.v_land;
  };
  for (std::size_t k = 0; k + 2 < fixes.size(); ++k) {
    if (slow(fixes[k], fixes[k + 1]) && slow(fixes[k + 1], fixes[k + 2])) {
      return Point2{s[fixes[k]].pos->x, s[fixes[k]].pos->y};
    }
  }
  const auto& first = *s[fixes.front()].pos;
  return Point2{first.x, first.y};
}

bool derive_won(const Track& track) {
  for (auto it = track.samples.rbegin(); it != track.samples.rend(); ++it) {
    if (it->players) return *it->players == 1;
  }
  return false;
}

std::optional<int> derive_final_place(const Track& track) {
  for (auto it = track.samples.rbegin(); it != track.samples.rend(); ++it) {
    if (it->players) return *it->players == 1 ? 1 : *it->players;
  }
  return std::nullopt;
}

KillPositions derive_killing_positions(const Track& track) {
  KillPositions out;
  int last = 0;
  for (const auto& s : track.samples) {
    if (!s.kills) continue;
    const int inc = *s.kills - last;
    last = *s.kills;
    if (inc <= 0) continue;
    if (s.pos) {
      for (int k = 0; k < inc; ++k) out.entries.push_back({s.pos->x, s.pos->y, s.t_s});
    } else {
      out.dropped += inc;
    }
  }
  return out;
}

std::map<Phase, double> derive_phase_durations(const Track& track, const DeriveParams& params) {
  std::map<Phase, double> d;
  const auto& s = track.samples;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double dt = i + 1 < s.size() ? s[i + 1].t_s - s[i].t_s : params.sample_period_s;
    d[s[i].phase] += dt;
  }
  return d;
}

double GameRecord::phase_seconds(Phase p) const {
  const auto it = phase_durations.find(p);
  return it == phase_durations.end() ? 0.0 : it->second;
}

GameRecord derive_record(const Track& track, const GameSpan& span, PlayerClass player_class,
                         const DeriveParams& params) {
  if (track.samples.empty()) throw AggregationFailed("empty track for " + span.game_id);
  GameRecord r;
  r.game_id = span.game_id;
  r.player_class = player_class;
  r.span = span;
  r.track = track;
  r.game_duration_s = span.end_t_s - span.start_t_s;

  r.landing_spot = derive_landing_spot(track, params);
  if (!r.landing_spot) r.flags |= kLandingUndetermined;

  for (const auto& s : track.samples) {
    if (s.pos) r.movement_trace.push_back({s.pos->x, s.pos->y, s.t_s});
    if (s.players) r.player_progression.push_back({s.t_s, *s.players});
    if (s.kills) r.total_kills = *s.kills;
  }

  r.final_place = derive_final_place(track);
  if (!r.final_place) r.flags |= kPlaceUndetermined;

  if (r.movement_trace.empty()) {
    r.flags |= kEndPositionUndetermined;
  } else {
    const Point2 end{r.movement_trace.back().x, r.movement_trace.back().y};
    if (derive_won(track)) r.win_position = end;
    else r.death_position = end;
  }

  r.killing_positions = derive_killing_positions(track);
  r.phase_durations = derive_phase_durations(track, params);
  return r;
}

const std::vector<std::string> kRecordsHeader = {
    "game_id", "class",     "start_s",   "end_s",  "duration_s", "place",
    "kills",   "landing_x", "landing_y", "death_x", "death_y",   "win_x",
    "win_y",   "jump_s",    "brew_s",    "contract_s", "dropped_kills"};
const std::vector<std::string> kKillsHeader = {"game_id", "t_s", "x", "y"};
const std::vector<std::string> kTracesHeader = {"game_id", "t_s", "x", "y", "flag"};
const std::vector<std::string> kProgressionHeader = {"game_id", "t_s", "players"};

RecordRow to_row(const GameRecord& r) {
  RecordRow row;
  row.game_id = r.game_id;
  row.player_class = r.player_class;
  row.start_s = r.span.start_t_s;
  row.end_s = r.span.end_t_s;
  row.duration_s = r.game_duration_s;
  row.place = r.final_place;
  row.kills = r.total_kills;
  row.landing = r.landing_spot;
  row.death = r.death_position;
  row.win = r.win_position;
  row.jump_s = r.phase_seconds(Phase::Jump);
  row.brew_s = r.phase_seconds(Phase::StormBrewing);
  row.contract_s = r.phase_seconds(Phase::Contraction);
  row.dropped_kills = r.killing_positions.dropped;
  return row;
}

void write_records_csv(std::ostream& out, const std::vector<GameRecord>& records) {
  CsvWriter w(out);
  w.row(kRecordsHeader);
  auto px = [](const std::optional<Point2>& p, bool x) {
    return p ? fmt_fixed(x ? p->x : p->y, 2) : std::string();
  };
  for (const auto& rec : records) {
    const RecordRow r = to_row(rec);
    w.row({r.game_id, std::string(class_name(r.player_class)), fmt_fixed(r.start_s, 3),
           fmt_fixed(r.end_s, 3), fmt_fixed(r.duration_s, 3), fmt_opt(r.place),
           std::to_string(r.kills), px(r.landing, true), px(r.landing, false), px(r.death, true),
           px(r.death, false), px(r.win, true), px(r.win, false), fmt_fixed(r.jump_s, 3),
           fmt_fixed(r.brew_s, 3), fmt_fixed(r.contract_s, 3), std::to_string(r.dropped_kills)});
  }
}

void write_kills_csv(std::ostream& out, const std::vector<GameRecord>& records) {
  CsvWriter w(out);
  w.row(kKillsHeader);
  for (const auto& r : records) {
    for (const auto& k : r.killing_positions.entries) {
      w.row({r.game_id, fmt_fixed(k.t_s, 3), fmt_fixed(k.x, 2), fmt_fixed(k.y, 2)});
    }
  }
}

void write_traces_csv(std::ostream& out, const std::vector<GameRecord>& records) {
  CsvWriter w(out);
  w.row(kTracesHeader);
  for (const auto& r : records) {
    for (const auto& s : r.track.samples) {
      if (!s.pos) continue;
      w.row({r.game_id, fmt_fixed(s.t_s, 3), fmt_fixed(s.pos->x, 2), fmt_fixed(s.pos->y, 2),
             flag_name(s.flags)});
    }
  }
}

void write_progression_csv(std::ostream& out, const std::vector<GameRecord>& records) {
  CsvWriter w(out);
  w.row(kProgressionHeader);
  for (const auto& r : records) {
    for (std::size_t i = 0; i < r.player_progression.size(); ++i) {
      const auto& p = r.player_progression[i];
      if (i > 0 && r.player_progression[i - 1].players == p.players) continue;
      w.row({r.game_id, fmt_fixed(p.t_s, 3), std::to_string(p.players)});
    }
  }
}

namespace {

std::optional<double> opt_num(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_double(s);
}

std::optional<Point2> opt_point(const std::string& x, const std::string& y) {
  const auto px = opt_num(x), py = opt_num(y);
  if (px.has_value() != py.has_value()) throw std::invalid_argument("half-empty coordinate pair");
  if (!px) return std::nullopt;
  return Point2{*px, *py};
}

template <typename Fn>
auto parse_rows(const std::filesystem::path& path, const std::vector<std::string>& header, Fn&& fn) {
  const auto table = read_csv(path);
  require_header(table, header, path.string());
  using Row = decltype(fn(table.rows.front()));
  std::vector<Row> out;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    try {
      out.push_back(fn(table.rows[i]));
    } catch (const std::invalid_argument& e) {
      throw InputError(path.string() + ": row " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

std::vector<RecordRow> read_records_csv(const std::filesystem::path& path) {
  return parse_rows(path, kRecordsHeader, [](const std::vector<std::string>& c) {
    RecordRow r;
    r.game_id = c[0];
    const auto cls = parse_class(c[1]);
    if (!cls) throw std::invalid_argument("unknown class '" + c[1] + "'");
    r.player_class = *cls;
    r.start_s = parse_double(c[2]);
    r.end_s = parse_double(c[3]);
    r.duration_s = parse_double(c[4]);
    if (!c[5].empty()) r.place = static_cast<int>(parse_long(c[5]));
    r.kills = static_cast<int>(parse_long(c[6]));
    r.landing = opt_point(c[7], c[8]);
    r.death = opt_point(c[9], c[10]);
    r.win = opt_point(c[11], c[12]);
    r.jump_s = parse_double(c[13]);
    r.brew_s = parse_double(c[14]);
    r.contract_s = parse_double(c[15]);
    r.dropped_kills = static_cast<int>(parse_long(c[16]));
    return r;
  });
}

std::vector<KillRow> read_kills_csv(const std::filesystem::path& path) {
  return parse_rows(path, kKillsHeader, [](const std::vector<std::string>& c) {
    return KillRow{c[0], parse_double(c[1]), parse_double(c[2]), parse_double(c[3])};
  });
}

std::vector<TraceRow> read_traces_csv(const std::filesystem::path& path) {
  return parse_rows(path, kTracesHeader, [](const std::vector<std::string>& c) {
    return TraceRow{c[0], parse_double(c[1]), parse_double(c[2]), parse_double(c[3]),
                    parse_flag(c[4])};
  });
}

}  // namespace hudtrace
