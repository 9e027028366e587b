#include <map>
#include <ostream>

#include "hudtrace/core/csv.hpp"
#include "hudtrace/core/error.hpp"
#include "hudtrace/core/kv.hpp"
#include "hudtrace/telemetry.hpp"

namespace hudtrace {

const std::vector<std::string> kTelemetryHeader = {"game_id", "t_s",     "phase", "x",   "y",
                                                   "pos_score", "players", "kills", "flag"};

std::string flag_name(std::uint8_t flags) {
  const bool rej = flags & kFlagRejected;
  const bool interp = flags & kFlagInterpolated;
  if (rej && interp) return "rejected+interpolated";
  if (rej) return "rejected";
  if (interp) return "interpolated";
  return "raw";
}

std::uint8_t parse_flag(const std::string& s) {
  if (s == "raw" || s.empty()) return kFlagRaw;
  if (s == "interpolated") return kFlagInterpolated;
  if (s == "rejected") return kFlagRejected;
  if (s == "rejected+interpolated") return kFlagRejected | kFlagInterpolated;
  throw InputError("unknown sample flag '" + s + "'");
}

void write_telemetry_csv(std::ostream& out, const std::vector<Track>& tracks) {
  CsvWriter w(out);
  w.row(kTelemetryHeader);
  for (const auto& t : tracks) {
    for (const auto& s : t.samples) {
      w.row({t.span.game_id, fmt_fixed(s.t_s, 3), std::string(phase_name(s.phase)),
             s.pos ? fmt_fixed(s.pos->x, 2) : "", s.pos ? fmt_fixed(s.pos->y, 2) : "",
             s.pos ? fmt_fixed(s.pos->score, 4) : "", fmt_opt(s.players), fmt_opt(s.kills),
             flag_name(s.flags)});
    }
  }
}

std::vector<Track> read_telemetry_csv(const std::filesystem::path& path, double sample_period_s) {
  const auto table = read_csv(path);
  require_header(table, kTelemetryHeader, path.string());
  std::vector<Track> tracks;
  std::map<std::string, std::size_t> index;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    auto where = [&] { return path.string() + ": row " + std::to_string(r + 1); };
    FrameSample s;
    try {
      s.t_s = parse_double(row[1]);
      const auto phase = parse_phase(row[2]);
      if (!phase) throw InputError(where() + ": unknown phase '" + row[2] + "'");
      s.phase = *phase;
      if (!row[3].empty()) {
        s.pos = MapPosition{parse_double(row[3]), parse_double(row[4]),
                            row[5].empty() ? 0.0 : parse_double(row[5])};
      }
      if (!row[6].empty()) s.players = static_cast<int>(parse_long(row[6]));
      if (!row[7].empty()) s.kills = static_cast<int>(parse_long(row[7]));
      s.flags = parse_flag(row[8]);
    } catch (const std::invalid_argument& e) {
      throw InputError(where() + ": " + e.what());
    }
    auto [it, fresh] = index.emplace(row[0], tracks.size());
    if (fresh) {
      Track t;
      t.span.game_id = row[0];
      t.span.start_t_s = s.t_s;
      tracks.push_back(std::move(t));
    }
    Track& t = tracks[it->second];
    if (!t.samples.empty() && s.t_s <= t.samples.back().t_s) {
      throw InputError(where() + ": timestamps not increasing within " + row[0]);
    }
    t.samples.push_back(s);
    t.span.end_t_s = s.t_s + sample_period_s;
  }
  return tracks;
}

}  // namespace hudtrace
