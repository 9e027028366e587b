#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace hudtrace {

// Flat `key=value` text: one pair per line, `#` starts a comment.
class KeyValueFile {
 public:
  static KeyValueFile parse(std::string_view text, const std::string& origin = "<memory>");
  static KeyValueFile load(const std::filesystem::path& path);

  [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) != 0; }
  [[nodiscard]] const std::string& get(const std::string& key) const;
  [[nodiscard]] std::string get_or(const std::string& key, const std::string& fallback) const;
  [[nodiscard]] double get_double(const std::string& key) const;
  [[nodiscard]] double get_double_or(const std::string& key, double fallback) const;
  [[nodiscard]] long get_int(const std::string& key) const;
  [[nodiscard]] long get_int_or(const std::string& key, long fallback) const;

  // Throws ConfigError naming the first key not in `allowed`.
  void reject_unknown(const std::set<std::string>& allowed) const;

  [[nodiscard]] const std::map<std::string, std::string>& values() const { return values_; }
  [[nodiscard]] const std::string& origin() const { return origin_; }

 private:
  std::map<std::string, std::string> values_;
  std::string origin_;
};

// Splits "a=1 b=2" style lines (used by atlas.meta) into ordered pairs.
std::vector<std::pair<std::string, std::string>> parse_kv_tokens(std::string_view line);

std::string trim(std::string_view s);

// Strict numeric parse of a whole string; throws std::invalid_argument.
double parse_double(std::string_view s);
long parse_long(std::string_view s);

}  // namespace hudtrace
