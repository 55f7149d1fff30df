#include "rydnhqc/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace rydnhqc::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

// Strips a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  }
  return true;
}

}  // namespace

void ResultTable::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) {
    throw std::invalid_argument("table " + name + ": row has " + std::to_string(row.size()) +
                                " cells, expected " + std::to_string(columns.size()));
  }
  for (double x : row) {
    if (!std::isfinite(x)) throw std::invalid_argument("table " + name + ": non-finite cell");
  }
  rows.push_back(std::move(row));
}

std::vector<double> ResultTable::column(const std::string& col) const {
  for (size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].name != col) continue;
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[j]);
    return out;
  }
  throw std::out_of_range("table " + name + " has no column " + col);
}

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_csv(const ResultTable& table, std::ostream& out) {
  out << "# ";
  for (size_t j = 0; j < table.columns.size(); ++j) {
    if (j) out << ',';
    out << table.columns[j].name << ':' << table.columns[j].unit;
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      out << format_number(row[j]);
    }
    out << '\n';
  }
}

std::filesystem::path write_csv(const ResultTable& table, const std::filesystem::path& dir) {
  const auto path = dir / (table.name + ".csv");
  std::ostringstream buf;
  write_csv(table, buf);
  write_text(path, buf.str());
  return path;
}

ResultTable read_csv(std::istream& in, std::string name) {
  ResultTable t;
  t.name = std::move(name);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) throw IoError("csv: missing '# name:unit' header");
  for (const auto& cell : split(line.substr(2), ',')) {
    const auto colon = cell.rfind(':');
    if (colon == std::string::npos) throw IoError("csv: header cell without unit: " + cell);
    t.columns.push_back({cell.substr(0, colon), cell.substr(colon + 1)});
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& cell : split(line, ',')) {
      double x = 0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), x);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) throw IoError("csv: bad number '" + cell + "'");
      row.push_back(x);
    }
    t.add_row(std::move(row));
  }
  return t;
}

ResultTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_csv(in, path.stem().string());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

ConfigDocument ConfigDocument::parse(std::istream& in) {
  ConfigDocument doc;
  std::string section;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(strip_comment(line));
    if (s.empty()) continue;
    auto fail = [&](const std::string& what) {
      throw ConfigError("config line " + std::to_string(lineno) + ": " + what);
    };
    if (s.front() == '[') {
      if (s.back() != ']') fail("unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (!valid_key(section)) fail("bad section name");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (!valid_key(key)) fail("bad key '" + key + "'");
    if (value.empty()) fail("missing value for " + key);
    if (doc.get(section, key)) fail("duplicate key " + key);
    doc.set(section, key, value);
  }
  return doc;
}

ConfigDocument ConfigDocument::parse(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

ConfigDocument ConfigDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse(in);
}

std::string ConfigDocument::serialize() const {
  std::ostringstream out;
  bool first = true;
  for (const auto& [name, entries] : sections_) {
    if (!name.empty()) out << (first ? "" : "\n") << '[' << name << "]\n";
    for (const auto& [k, v] : entries) out << k << " = " << v << '\n';
    first = false;
  }
  return out.str();
}

void ConfigDocument::set(const std::string& section, const std::string& key, std::string raw) {
  auto it = std::find_if(sections_.begin(), sections_.end(), [&](const auto& s) { return s.first == section; });
  if (it == sections_.end()) {
    // Top-level keys must precede every section header.
    if (section.empty()) {
      it = sections_.insert(sections_.begin(), {section, {}});
    } else {
      sections_.push_back({section, {}});
      it = std::prev(sections_.end());
    }
  }
  for (auto& [k, v] : it->second) {
    if (k == key) {
      v = std::move(raw);
      return;
    }
  }
  it->second.emplace_back(key, std::move(raw));
}

std::optional<std::string> ConfigDocument::get(const std::string& section, const std::string& key) const {
  for (const auto& [name, entries] : sections_) {
    if (name != section) continue;
    for (const auto& [k, v] : entries) {
      if (k == key) return v;
    }
  }
  return std::nullopt;
}

double parse_double(const std::string& raw) {
  const std::string s = trim(raw);
  double x = 0;
  const char* b = s.data();
  if (!s.empty() && s.front() == '+') ++b;
  const auto res = std::from_chars(b, s.data() + s.size(), x);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ConfigError("expected a number, got '" + raw + "'");
  }
  return x;
}

long long parse_int(const std::string& raw) {
  const std::string s = trim(raw);
  long long x = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ConfigError("expected an integer, got '" + raw + "'");
  }
  return x;
}

bool parse_bool(const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "true") return true;
  if (s == "false") return false;
  throw ConfigError("expected true or false, got '" + raw + "'");
}

std::string parse_string(const std::string& raw) {
  const std::string s = trim(raw);
  if (s.size() < 2 || s.front() != '"' || s.back() != '"') throw ConfigError("expected a quoted string, got '" + raw + "'");
  const std::string body = s.substr(1, s.size() - 2);
  if (body.find('"') != std::string::npos) throw ConfigError("embedded quotes are not supported");
  return body;
}

std::vector<double> parse_double_list(const std::string& raw) {
  const std::string s = trim(raw);
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') throw ConfigError("expected a [list], got '" + raw + "'");
  std::vector<double> out;
  const std::string body = trim(s.substr(1, s.size() - 2));
  if (body.empty()) return out;
  for (const auto& cell : split(body, ',')) out.push_back(parse_double(cell));
  return out;
}

std::string quote(const std::string& s) {
  if (s.find('"') != std::string::npos) throw ConfigError("strings with quotes cannot be serialized");
  return '"' + s + '"';
}

std::string raw_bool(bool b) { return b ? "true" : "false"; }

std::string raw_list(const std::vector<double>& xs) {
  std::string out = "[";
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += format_number(xs[i]);
  }
  return out + "]";
}

}  // namespace rydnhqc::io
