#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "hudtrace/core/csv.hpp"
#include "hudtrace/core/kv.hpp"
#include "hudtrace/stats.hpp"

namespace hudtrace {

const std::vector<std::string> kSurveyHeader = {"participant_id", "game_id",
                                                "satisfaction",   "enjoyment",
                                                "strategy",       "hours_gaming_per_week",
                                                "fortnite_watch_hours"};

void check_survey(const std::vector<SurveyRow>& rows, const std::string& origin) {
  std::set<std::string> seen;
  for (const auto& r : rows) {
    if (r.satisfaction < 1 || r.satisfaction > 5 || r.enjoyment < 1 || r.enjoyment > 5) {
      throw InputError(origin + ": Likert value outside 1..5 for game " + r.game_id);
    }
    if (!seen.insert(r.game_id).second) throw InputError(origin + ": duplicate game_id " + r.game_id);
  }
}

std::vector<SurveyRow> read_survey_csv(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  require_header(table, kSurveyHeader, path.string());
  std::vector<SurveyRow> rows;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& f = table.rows[i];
    try {
      rows.push_back({f[0], f[1], static_cast<int>(parse_long(f[2])), static_cast<int>(parse_long(f[3])), f[4],
                      parse_double(f[5]), parse_double(f[6])});
    } catch (const std::invalid_argument&) {
      throw InputError(path.string() + ": bad numeric field on data row " + std::to_string(i + 1));
    }
  }
  check_survey(rows, path.string());
  return rows;
}

std::optional<std::size_t> AnalysisTable::find(const std::string& column) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == column) return i;
  }
  return std::nullopt;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double membership(const HotSpotMap* map, const std::optional<Point2>& p) {
  if (!p) return kNaN;
  return contains(*map, *p).has_value() ? 1.0 : 0.0;
}

}  // namespace

AnalysisTable join_survey(const std::vector<RecordRow>& records, const std::vector<SurveyRow>* survey,
                          const HotspotContext& hotspots) {
  std::map<std::string, const RecordRow*> by_id;
  for (const auto& r : records) {
    if (!by_id.emplace(r.game_id, &r).second) throw InputError("duplicate game_id in records: " + r.game_id);
  }
  if (survey) check_survey(*survey);

  AnalysisTable t;
  if (survey) t.columns = {"satisfaction", "enjoyment"};
  for (const char* c : {"duration_s", "place", "kills"}) t.columns.emplace_back(c);
  if (hotspots.landing) t.columns.emplace_back("landed_in_landing_hotspot");
  if (hotspots.activity) t.columns.emplace_back("landed_in_activity_hotspot");
  if (survey) {
    t.columns.emplace_back("hours_gaming_per_week");
    t.columns.emplace_back("fortnite_watch_hours");
  }
  t.values.assign(t.columns.size(), {});

  auto add = [&](const RecordRow& r, const SurveyRow* s) {
    std::vector<double> row;
    if (s) {
      row.push_back(s->satisfaction);
      row.push_back(s->enjoyment);
    }
    row.push_back(r.duration_s);
    row.push_back(r.place ? static_cast<double>(*r.place) : kNaN);
    row.push_back(r.kills);
    if (hotspots.landing) row.push_back(membership(hotspots.landing, r.landing));
    if (hotspots.activity) row.push_back(membership(hotspots.activity, r.landing));
    if (s) {
      row.push_back(s->hours_gaming_per_week);
      row.push_back(s->fortnite_watch_hours);
    }
    for (std::size_t c = 0; c < row.size(); ++c) t.values[c].push_back(row[c]);
    t.game_ids.push_back(r.game_id);
  };

  if (!survey) {
    for (const auto& r : records) add(r, nullptr);
    return t;
  }
  std::set<std::string> matched;
  for (const auto& s : *survey) {
    const auto it = by_id.find(s.game_id);
    if (it == by_id.end()) {
      t.unmatched_survey.push_back(s.game_id);
      continue;
    }
    matched.insert(s.game_id);
    add(*it->second, &s);
  }
  for (const auto& r : records) {
    if (!matched.count(r.game_id)) t.unmatched_records.push_back(r.game_id);
  }
  return t;
}

}  // namespace hudtrace
