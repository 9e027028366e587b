#pragma once

// Spearman rank correlation with t-approximated p-values, survey joins and the
// hypothesis report (text table plus CSV).

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hudtrace/core/error.hpp"
#include "hudtrace/derive.hpp"
#include "hudtrace/maps.hpp"

namespace hudtrace {

class UndefinedCorrelation : public InvariantError {
 public:
  using InvariantError::InvariantError;
};

// Ranks 1..n, ties get the mean of the ranks they span. Throws
// std::invalid_argument on NaN or empty input.
std::vector<double> rank(const std::vector<double>& values);

struct CorrelationResult {
  std::string metric_x, metric_y;
  double r_s = 0;
  int n = 0;
  double p = 1;
};

// Two-sided p from the Student-t approximation with n-2 degrees of freedom.
double spearman_t_pvalue(double r_s, int n);

// Throws std::invalid_argument on length mismatch or n < 3 and
// UndefinedCorrelation when either input has zero rank variance.
CorrelationResult spearman(const std::vector<double>& x, const std::vector<double>& y);

// Exact two-sided permutation p over all n! orderings of y (n <= 10).
double spearman_permutation_p(const std::vector<double>& x, const std::vector<double>& y);

struct SurveyRow {
  std::string participant_id;
  std::string game_id;
  int satisfaction = 0;
  int enjoyment = 0;
  std::string strategy;
  double hours_gaming_per_week = 0;
  double fortnite_watch_hours = 0;
};

extern const std::vector<std::string> kSurveyHeader;
// Validates Likert ranges and rejects duplicate game ids.
std::vector<SurveyRow> read_survey_csv(const std::filesystem::path& path);
void check_survey(const std::vector<SurveyRow>& rows, const std::string& origin = "survey");

// Column-major numeric table; NaN marks a missing value.
struct AnalysisTable {
  std::vector<std::string> columns;
  std::vector<std::string> game_ids;
  std::vector<std::vector<double>> values;  // values[column][row]
  std::vector<std::string> unmatched_survey;   // survey game ids without a record
  std::vector<std::string> unmatched_records;  // record game ids without a survey row

  [[nodiscard]] std::optional<std::size_t> find(const std::string& column) const;
  [[nodiscard]] std::size_t rows() const { return game_ids.size(); }
};

struct HotspotContext {
  const HotSpotMap* landing = nullptr;
  const HotSpotMap* activity = nullptr;
};

// With a survey, one row per matched game in survey order; without one
// (`survey == nullptr`), one row per record and no survey columns.
AnalysisTable join_survey(const std::vector<RecordRow>& records, const std::vector<SurveyRow>* survey,
                          const HotspotContext& hotspots = {});

struct MetricPair {
  std::string x, y;
};
// "a:b,c:d" -> pairs.
std::vector<MetricPair> parse_pairs(const std::string& text);
std::vector<MetricPair> default_pairs(const AnalysisTable& table);

enum class Strength { Weak, Medium, Strong };
std::string_view strength_name(Strength s) noexcept;
Strength strength_of(double r_s) noexcept;
// "<0.001", "<0.01", "<0.05" or "n.s.".
std::string significance_band(double p);

struct ReportEntry {
  MetricPair pair;
  std::optional<CorrelationResult> result;  // empty when undefined
  std::string error;
};

struct HypothesisReport {
  std::vector<ReportEntry> entries;
  std::vector<std::string> unmatched_survey;
  std::vector<std::string> unmatched_records;
};

// Rows with a missing value in either metric are dropped pairwise. Throws
// ConfigError when a requested metric is not a table column.
HypothesisReport hypothesis_report(const AnalysisTable& table, const std::vector<MetricPair>& pairs,
                                   unsigned jobs = 1);

extern const std::vector<std::string> kReportHeader;
std::string format_report_text(const HypothesisReport& report);
std::string format_report_csv(const HypothesisReport& report);
// "r_s(df) = value" with df = n - 2.
std::string format_rs(const CorrelationResult& r);

}  // namespace hudtrace
