#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace chatlens::csv {

/// Shortest round-trip representation; "nan"/"inf" for non-finite values.
std::string format_number(double v);

/// Quotes a field when it contains a comma, quote, or newline.
std::string escape(std::string_view field);

/// Row-at-a-time CSV writer. Cells are appended with `<<` and the row is
/// terminated by end_row().
class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  Writer& operator<<(std::string_view s);
  Writer& operator<<(const std::string& s) { return *this << std::string_view(s); }
  Writer& operator<<(const char* s) { return *this << std::string_view(s); }
  Writer& operator<<(double v);
  Writer& operator<<(std::int64_t v);
  Writer& operator<<(int v) { return *this << static_cast<std::int64_t>(v); }
  Writer& operator<<(std::size_t v) { return *this << static_cast<std::int64_t>(v); }
  /// Empty cell for nullopt.
  Writer& operator<<(const std::optional<double>& v);

  void header(std::initializer_list<std::string_view> names);
  void end_row();

 private:
  void separate();
  std::ostream& out_;
  bool first_ = true;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws DataError when absent.
  std::size_t column(std::string_view name) const;
  std::vector<double> numeric_column(std::string_view name) const;
};

/// Parses RFC 4180-style CSV with a header row. Lines starting with `#` are skipped.
Table parse(std::string_view text);
Table read_file(const std::string& path);

}  // namespace chatlens::csv
