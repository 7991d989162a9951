#include "chatlens/time.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

namespace chatlens {

namespace {

using std::chrono::days;
using std::chrono::sys_days;
using std::chrono::year_month_day;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  auto res = std::from_chars(s.data() + pos, s.data() + pos + len, out);
  return res.ec == std::errc{};
}

std::string offset_suffix(TzOffset tz) {
  if (tz.minutes == 0) return "Z";
  int m = tz.minutes < 0 ? -tz.minutes : tz.minutes;
  char buf[24];
  std::snprintf(buf, sizeof buf, "%c%02d:%02d", tz.minutes < 0 ? '-' : '+', m / 60, m % 60);
  return buf;
}

struct Civil {
  int year;
  unsigned month, day;
  int hour, minute, second;
};

Civil to_civil(Timestamp t, TzOffset tz) {
  std::int64_t local = t.seconds + std::int64_t{tz.minutes} * 60;
  std::int64_t day = floor_div(local, 86400);
  std::int64_t rem = local - day * 86400;
  year_month_day ymd{sys_days{days{day}}};
  return {static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
          static_cast<unsigned>(ymd.day()), static_cast<int>(rem / 3600),
          static_cast<int>((rem % 3600) / 60), static_cast<int>(rem % 60)};
}

}  // namespace

std::optional<Timestamp> parse_iso8601(std::string_view s) {
  int y, mo, d, h, mi, sec = 0;
  if (!read_int(s, 0, 4, y) || s.size() < 16 || s[4] != '-' || !read_int(s, 5, 2, mo) ||
      s[7] != '-' || !read_int(s, 8, 2, d) || (s[10] != 'T' && s[10] != ' ') ||
      !read_int(s, 11, 2, h) || s[13] != ':' || !read_int(s, 14, 2, mi)) {
    return std::nullopt;
  }
  std::size_t pos = 16;
  if (pos < s.size() && s[pos] == ':') {
    if (!read_int(s, pos + 1, 2, sec)) return std::nullopt;
    pos += 3;
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
    }
  }
  int offset = 0;
  if (pos < s.size()) {
    if (s[pos] == 'Z' && pos + 1 == s.size()) {
      pos += 1;
    } else if ((s[pos] == '+' || s[pos] == '-') && s.size() == pos + 6 && s[pos + 3] == ':') {
      int oh, om;
      if (!read_int(s, pos + 1, 2, oh) || !read_int(s, pos + 4, 2, om)) return std::nullopt;
      offset = (oh * 60 + om) * (s[pos] == '-' ? -1 : 1);
      pos += 6;
    } else {
      return std::nullopt;
    }
  }
  if (h > 23 || mi > 59 || sec > 60) return std::nullopt;
  year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                     std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  std::int64_t day = sys_days{ymd}.time_since_epoch().count();
  std::int64_t secs = day * 86400 + h * 3600 + mi * 60 + sec - std::int64_t{offset} * 60;
  return Timestamp{secs};
}

std::string format_iso8601(Timestamp t, TzOffset tz) {
  Civil c = to_civil(t, tz);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d", c.year, c.month, c.day, c.hour,
                c.minute, c.second);
  return std::string(buf) + offset_suffix(tz);
}

std::string format_iso8601_minutes(Timestamp t, TzOffset tz) {
  Civil c = to_civil(t, tz);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d", c.year, c.month, c.day, c.hour,
                c.minute);
  return std::string(buf) + offset_suffix(tz);
}

LocalDate local_date(Timestamp t, TzOffset tz) {
  return {floor_div(t.seconds + std::int64_t{tz.minutes} * 60, 86400)};
}

int local_minute_of_day(Timestamp t, TzOffset tz) {
  std::int64_t local = t.seconds + std::int64_t{tz.minutes} * 60;
  return static_cast<int>((local - floor_div(local, 86400) * 86400) / 60);
}

int local_weekday(Timestamp t, TzOffset tz) {
  std::chrono::weekday wd{sys_days{days{local_date(t, tz).days}}};
  return static_cast<int>(wd.iso_encoding());
}

std::string format_date(LocalDate d) {
  year_month_day ymd{sys_days{days{d.days}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::optional<LocalDate> parse_date(std::string_view s) {
  int y, m, d;
  if (s.size() != 10 || !read_int(s, 0, 4, y) || s[4] != '-' || !read_int(s, 5, 2, m) ||
      s[7] != '-' || !read_int(s, 8, 2, d)) {
    return std::nullopt;
  }
  year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                     std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return LocalDate{sys_days{ymd}.time_since_epoch().count()};
}

Timestamp start_of_day(LocalDate d, TzOffset tz) {
  return {d.days * 86400 - std::int64_t{tz.minutes} * 60};
}

}  // namespace chatlens
