#include "chatlens/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "chatlens/error.hpp"

namespace chatlens::csv {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void Writer::separate() {
  if (!first_) out_ << ',';
  first_ = false;
}

Writer& Writer::operator<<(std::string_view s) {
  separate();
  out_ << escape(s);
  return *this;
}

Writer& Writer::operator<<(double v) {
  separate();
  out_ << format_number(v);
  return *this;
}

Writer& Writer::operator<<(std::int64_t v) {
  separate();
  out_ << v;
  return *this;
}

Writer& Writer::operator<<(const std::optional<double>& v) {
  if (v) return *this << *v;
  separate();
  return *this;
}

void Writer::header(std::initializer_list<std::string_view> names) {
  for (auto n : names) *this << n;
  end_row();
}

void Writer::end_row() {
  out_ << '\n';
  first_ = true;
}

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw DataError("missing CSV column '" + std::string(name) + "'");
}

std::vector<double> Table::numeric_column(std::string_view name) const {
  std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::string& cell = c < rows[r].size() ? rows[r][c] : std::string{};
    double v = 0;
    auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
      throw DataError("row " + std::to_string(r + 2) + ", column '" + std::string(name) +
                      "': not a number: '" + cell + "'");
    }
    out.push_back(v);
  }
  return out;
}

Table parse(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> row;
  std::string cell;
  bool in_quotes = false;
  bool at_line_start = true;
  bool skipping_comment = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (skipping_comment) {
      if (c == '\n') {
        skipping_comment = false;
        at_line_start = true;
      }
      continue;
    }
    if (at_line_start && c == '#') {
      skipping_comment = true;
      continue;
    }
    at_line_start = false;
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        cell += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      row.push_back(std::move(cell));
      cell.clear();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(std::move(cell));
      cell.clear();
      records.push_back(std::move(row));
      row.clear();
      at_line_start = true;
    } else {
      cell += c;
    }
  }
  if (in_quotes) throw DataError("unterminated quoted CSV field");
  if (!cell.empty() || !row.empty()) {
    row.push_back(std::move(cell));
    records.push_back(std::move(row));
  }
  Table t;
  if (records.empty()) return t;
  t.header = std::move(records.front());
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].size() == 1 && records[i][0].empty()) continue;
    t.rows.push_back(std::move(records[i]));
  }
  return t;
}

Table read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

}  // namespace chatlens::csv
