#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hudtrace {

// Minimal RFC-4180 style CSV: quoted fields may contain commas, quotes and newlines.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column index by name; throws InputError when absent.
  [[nodiscard]] std::size_t column(std::string_view name) const;
  [[nodiscard]] std::optional<std::size_t> find_column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text, const std::string& origin = "<memory>");
CsvTable read_csv(const std::filesystem::path& path);

// Checks the header equals `expected` exactly.
void require_header(const CsvTable& table, const std::vector<std::string>& expected,
                    const std::string& origin);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
};

void write_text_file(const std::filesystem::path& path, std::string_view content);

// Fixed-precision decimal formatting used by every CSV writer (locale independent).
std::string fmt_fixed(double v, int decimals);
std::string fmt_opt(const std::optional<double>& v, int decimals);
std::string fmt_opt(const std::optional<int>& v);

}  // namespace hudtrace
