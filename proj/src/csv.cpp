#include "mbsts/csv.hpp"

#include "mbsts/error.hpp"
#include "mbsts/format.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mbsts {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text, const std::string& what) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && (text[b] == ' ' || text[b] == '\t')) ++b;
  while (e > b && (text[e - 1] == ' ' || text[e - 1] == '\t')) --e;
  if (b == e) throw ConfigError(what + ": empty value");
  const char* first = text.data() + b;
  if (*first == '+') ++first;
  double v = 0.0;
  const auto res = std::from_chars(first, text.data() + e, v);
  if (res.ec != std::errc() || res.ptr != text.data() + e) {
    throw ConfigError(what + ": cannot parse '" + text.substr(b, e - b) + "' as a number");
  }
  return v;
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == name) return j;
  }
  throw ConfigError(source + ": missing column '" + name + "'");
}

bool CsvTable::has_column(const std::string& name) const {
  for (const auto& h : header) {
    if (h == name) return true;
  }
  return false;
}

Eigen::MatrixXd CsvTable::numeric(const std::vector<std::string>& names) const {
  std::vector<std::size_t> idx;
  for (const auto& n : names) idx.push_back(column(n));
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(names.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < idx.size(); ++c) {
      const std::string where = source + " row " + std::to_string(r + 1) + " column '" + names[c] + "'";
      const auto& cell = rows[r][idx[c]];
      const double v = parse_double(cell, where);
      if (!std::isfinite(v)) throw ConfigError(where + ": missing or non-finite value");
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    }
  }
  return out;
}

std::vector<std::string> CsvTable::strings(const std::string& name) const {
  const auto j = column(name);
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[j]);
  return out;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell.push_back(ch);
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
  return s.substr(b, e - b);
}

}  // namespace

CsvTable parse_csv(const std::string& text, const std::string& source) {
  std::vector<std::string> lines;
  std::string cur;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (ch == '\r' || ch == '\n') {
      lines.push_back(std::move(cur));
      cur.clear();
      if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) lines.push_back(std::move(cur));
  while (!lines.empty() && lines.back().empty()) lines.pop_back();

  CsvTable table;
  table.source = source;
  if (lines.empty()) throw ConfigError(source + ": no header row");
  for (auto& h : split_line(lines.front())) table.header.push_back(trim(h));
  for (std::size_t l = 1; l < lines.size(); ++l) {
    auto cells = split_line(lines[l]);
    if (cells.size() != table.header.size()) {
      throw ConfigError(source + " row " + std::to_string(l) + ": expected " + std::to_string(table.header.size()) +
                        " cells, found " + std::to_string(cells.size()));
    }
    for (auto& c : cells) c = trim(c);
    table.rows.push_back(std::move(cells));
  }
  return table;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path.string());
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw IoError("error writing " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_text(path), path.filename().string()); }

std::string matrix_to_csv(const std::vector<std::string>& header, const Eigen::MatrixXd& values,
                          const std::vector<std::string>& first) {
  std::string out;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) out += ',';
    out += header[j];
  }
  out += '\n';
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    bool comma = false;
    if (!first.empty()) {
      out += first[static_cast<std::size_t>(r)];
      comma = true;
    }
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      if (comma) out += ',';
      out += format_double(values(r, c));
      comma = true;
    }
    out += '\n';
  }
  return out;
}

}  // namespace mbsts
