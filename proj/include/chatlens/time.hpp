#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace chatlens {

/// Instant in UTC, seconds since the Unix epoch.
struct Timestamp {
  std::int64_t seconds = 0;

  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;

  static constexpr Timestamp from_minutes(std::int64_t m) { return {m * 60}; }
  constexpr std::int64_t minutes() const {
    return seconds >= 0 ? seconds / 60 : -((-seconds + 59) / 60);
  }
  constexpr Timestamp truncated_to_minute() const { return from_minutes(minutes()); }
};

/// Fixed offset from UTC in minutes. No DST rules are applied.
struct TzOffset {
  int minutes = -300;
  friend bool operator==(const TzOffset&, const TzOffset&) = default;
};

inline constexpr TzOffset kDefaultTz{-300};

/// Local calendar day, counted in days since 1970-01-01.
struct LocalDate {
  std::int64_t days = 0;
  friend auto operator<=>(const LocalDate&, const LocalDate&) = default;
};

/// Parses `YYYY-MM-DDTHH:MM[:SS[.fff]][Z|+HH:MM|-HH:MM]`. A space may replace
/// the `T`. A missing zone designator means UTC.
std::optional<Timestamp> parse_iso8601(std::string_view text);

/// `YYYY-MM-DDTHH:MM:SS±HH:MM` rendered in the given offset.
std::string format_iso8601(Timestamp t, TzOffset tz);
/// `YYYY-MM-DDTHH:MM±HH:MM`; seconds are dropped.
std::string format_iso8601_minutes(Timestamp t, TzOffset tz);

LocalDate local_date(Timestamp t, TzOffset tz);
/// Minutes after local midnight, in [0, 1440).
int local_minute_of_day(Timestamp t, TzOffset tz);
/// ISO weekday, Monday = 1 ... Sunday = 7.
int local_weekday(Timestamp t, TzOffset tz);

std::string format_date(LocalDate d);
std::optional<LocalDate> parse_date(std::string_view text);
/// Local midnight of `d` as an instant.
Timestamp start_of_day(LocalDate d, TzOffset tz);

}  // namespace chatlens
