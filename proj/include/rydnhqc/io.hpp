#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rydnhqc::io {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Column {
  std::string name;
  std::string unit;  // "1" for dimensionless
  bool operator==(const Column&) const = default;
};

/// Named numeric table written as `<name>.csv`.
struct ResultTable {
  std::string name;
  std::vector<Column> columns;
  std::vector<std::vector<double>> rows;

  /// Throws std::invalid_argument on a width mismatch or a non-finite cell.
  void add_row(std::vector<double> row);
  /// Values of one column by name.
  std::vector<double> column(const std::string& name) const;
};

/// Shortest decimal string that parses back to the same double.
std::string format_number(double x);

/// Header `# name:unit,...` then one comma-separated line per row.
void write_csv(const ResultTable& table, std::ostream& out);
/// Writes dir/<name>.csv; failures carry the path.
std::filesystem::path write_csv(const ResultTable& table, const std::filesystem::path& dir);
ResultTable read_csv(std::istream& in, std::string name = {});
ResultTable read_csv(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);

/// Minimal TOML subset: `[section]` headers, `key = value` lines and `#`
/// comments. Values are kept as raw text and converted on access.
class ConfigDocument {
 public:
  using Entries = std::vector<std::pair<std::string, std::string>>;

  static ConfigDocument parse(std::istream& in);
  static ConfigDocument parse(const std::string& text);
  static ConfigDocument load(const std::filesystem::path& path);

  std::string serialize() const;

  /// Empty section means the top level.
  void set(const std::string& section, const std::string& key, std::string raw);
  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  const std::vector<std::pair<std::string, Entries>>& sections() const { return sections_; }

 private:
  std::vector<std::pair<std::string, Entries>> sections_;
};

// Conversions between raw config text and typed values. All throw ConfigError.
double parse_double(const std::string& raw);
long long parse_int(const std::string& raw);
bool parse_bool(const std::string& raw);
std::string parse_string(const std::string& raw);
std::vector<double> parse_double_list(const std::string& raw);

std::string quote(const std::string& s);
std::string raw_bool(bool b);
std::string raw_list(const std::vector<double>& xs);

}  // namespace rydnhqc::io
