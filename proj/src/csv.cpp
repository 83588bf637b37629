#include "nvsim/csv.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

namespace nvsim {

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_csv(const Trace& t) {
  t.validate();
  std::string out = t.x_name;
  for (const auto& [name, _] : t.columns) out += "," + name;
  out += "\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    out += format_number(t.x[i]);
    for (const auto& [_, v] : t.columns) out += "," + format_number(v[i]);
    out += "\n";
  }
  return out;
}

void write_csv(const std::filesystem::path& path, const Trace& t) {
  const std::string text = format_csv(t);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? line.size() - start
                                                                      : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view strip(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

Trace parse_csv(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    const auto nl = text.find('\n', start);
    std::string_view line =
        strip(text.substr(start, nl == std::string_view::npos ? text.size() - start : nl - start));
    start = nl == std::string_view::npos ? text.size() : nl + 1;
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.empty()) throw CsvError("empty CSV");
  const auto header = split(lines[0]);
  if (header.size() < 2) throw CsvError("CSV needs an x column and at least one signal column");
  std::set<std::string> seen;
  Trace t;
  for (std::size_t j = 0; j < header.size(); ++j) {
    const std::string name(strip(header[j]));
    if (name.empty()) throw CsvError("empty column name in header");
    if (!seen.insert(name).second) throw CsvError("duplicate column '" + name + "'");
    double probe = 0.0;
    const auto r = std::from_chars(name.data(), name.data() + name.size(), probe);
    if (r.ec == std::errc() && r.ptr == name.data() + name.size()) {
      throw CsvError("header row missing (first line is numeric)");
    }
    if (j == 0) {
      t.x_name = name;
    } else {
      t.columns.emplace_back(name, std::vector<double>{});
    }
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split(lines[i]);
    if (fields.size() != header.size()) {
      throw CsvError("row " + std::to_string(i + 1) + ": expected " +
                     std::to_string(header.size()) + " fields, got " +
                     std::to_string(fields.size()));
    }
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const auto f = strip(fields[j]);
      double v = 0.0;
      const auto r = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || r.ec != std::errc() || r.ptr != f.data() + f.size()) {
        throw CsvError("row " + std::to_string(i + 1) + ", column " + std::to_string(j + 1) +
                       ": not a number '" + std::string(f) + "'");
      }
      if (j == 0) {
        t.x.push_back(v);
      } else {
        t.columns[j - 1].second.push_back(v);
      }
    }
  }
  for (std::size_t i = 1; i < t.x.size(); ++i) {
    if (t.x[i] < t.x[i - 1]) throw CsvError("x column '" + t.x_name + "' decreases");
  }
  return t;
}

Trace read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

}  // namespace nvsim
