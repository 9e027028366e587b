#include <cmath>
#include <sstream>

#include "hudtrace/core/csv.hpp"
#include "hudtrace/core/kv.hpp"
#include "hudtrace/core/parallel.hpp"
#include "hudtrace/stats.hpp"

namespace hudtrace {

const std::vector<std::string> kReportHeader = {"metric_x", "metric_y", "r_s", "n", "p", "strength", "significance"};

std::vector<MetricPair> parse_pairs(const std::string& text) {
  std::vector<MetricPair> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == item.size()) {
      throw ConfigError("metric pair '" + item + "' is not of the form x:y");
    }
    out.push_back({trim(item.substr(0, colon)), trim(item.substr(colon + 1))});
  }
  return out;
}

std::vector<MetricPair> default_pairs(const AnalysisTable& table) {
  const std::vector<MetricPair> wanted = {
      {"satisfaction", "enjoyment"},
      {"place", "kills"},
      {"duration_s", "enjoyment"},
      {"duration_s", "kills"},
      {"place", "hours_gaming_per_week"},
      {"fortnite_watch_hours", "landed_in_landing_hotspot"},
      {"hours_gaming_per_week", "landed_in_landing_hotspot"},
  };
  std::vector<MetricPair> out;
  for (const auto& p : wanted) {
    if (table.find(p.x) && table.find(p.y)) out.push_back(p);
  }
  return out;
}

HypothesisReport hypothesis_report(const AnalysisTable& table, const std::vector<MetricPair>& pairs, unsigned jobs) {
  for (const auto& p : pairs) {
    for (const auto& m : {p.x, p.y}) {
      if (!table.find(m)) throw ConfigError("unknown metric '" + m + "'");
    }
  }
  HypothesisReport rep;
  rep.entries.resize(pairs.size());
  rep.unmatched_survey = table.unmatched_survey;
  rep.unmatched_records = table.unmatched_records;
  parallel_for(pairs.size(), jobs, [&](std::size_t i) {
    ReportEntry& e = rep.entries[i];
    e.pair = pairs[i];
    const auto& xs = table.values[*table.find(pairs[i].x)];
    const auto& ys = table.values[*table.find(pairs[i].y)];
    std::vector<double> x, y;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      if (std::isnan(xs[k]) || std::isnan(ys[k])) continue;
      x.push_back(xs[k]);
      y.push_back(ys[k]);
    }
    try {
      auto r = spearman(x, y);
      r.metric_x = pairs[i].x;
      r.metric_y = pairs[i].y;
      e.result = r;
    } catch (const UndefinedCorrelation& ex) {
      e.error = ex.what();
    } catch (const std::invalid_argument& ex) {
      e.error = ex.what();
    }
  });
  return rep;
}

std::string format_rs(const CorrelationResult& r) {
  return "r_s(" + std::to_string(r.n - 2) + ") = " + fmt_fixed(r.r_s, 2);
}

std::string format_report_text(const HypothesisReport& report) {
  std::ostringstream o;
  for (const auto& e : report.entries) {
    o << e.pair.x << " vs " << e.pair.y << ": ";
    if (!e.result) {
      o << "undefined (" << e.error << ")\n";
      continue;
    }
    const auto& r = *e.result;
    const std::string band = significance_band(r.p);
    o << format_rs(r) << ", n = " << r.n << ", " << (band == "n.s." ? "n.s." : "p " + band.substr(0, 1) + " " + band.substr(1))
      << ", " << strength_name(strength_of(r.r_s)) << "\n";
  }
  if (!report.unmatched_survey.empty()) {
    o << "unmatched survey rows (" << report.unmatched_survey.size() << "):";
    for (const auto& id : report.unmatched_survey) o << " " << id;
    o << "\n";
  }
  if (!report.unmatched_records.empty()) {
    o << "records without survey (" << report.unmatched_records.size() << "):";
    for (const auto& id : report.unmatched_records) o << " " << id;
    o << "\n";
  }
  return o.str();
}

std::string format_report_csv(const HypothesisReport& report) {
  std::ostringstream o;
  CsvWriter w(o);
  w.row(kReportHeader);
  for (const auto& e : report.entries) {
    if (!e.result) {
      w.row({e.pair.x, e.pair.y, "", "", "", "undefined", "undefined"});
      continue;
    }
    const auto& r = *e.result;
    w.row({e.pair.x, e.pair.y, fmt_fixed(r.r_s, 6), std::to_string(r.n), fmt_fixed(r.p, 8),
           std::string(strength_name(strength_of(r.r_s))), significance_band(r.p)});
  }
  return o.str();
}

}  // namespace hudtrace
