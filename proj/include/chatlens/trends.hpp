#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chatlens/corpus.hpp"
#include "chatlens/stats.hpp"

namespace chatlens::trends {

struct DailyPoint {
  LocalDate date;
  double value = 0;
  std::size_t numerator = 0;
  std::size_t denominator = 0;
};

struct DailySeries {
  std::vector<DailyPoint> points;  // strictly increasing dates
};

enum class Granularity { Message, Group, User };
Granularity parse_granularity(std::string_view s);

/// Stems match by prefix against stemmed tokens. Only days with a non-zero
/// denominator appear.
DailySeries keyword_daily_share(const Corpus& corpus, const std::vector<std::string>& stems, Granularity granularity,
                                std::size_t min_words = 5, TzOffset tz = kDefaultTz);

struct Period {
  LocalDate from;  // inclusive
  LocalDate to;    // inclusive
  bool contains(LocalDate d) const { return d >= from && d <= to; }
};

enum class Metric {
  TextWords,
  TextChars,
  AudioSeconds,
  VideoSeconds,
  MessagesPerUserDay,
  RepliesPerMessage,
  CascadeVirality,
  KeywordShare,
};
Metric parse_metric(std::string_view s);
std::string_view to_string(Metric m);

struct CompareOptions {
  std::optional<bool> forwarded;    // filter on the forwarded flag
  std::vector<std::string> stems;   // for KeywordShare
  std::size_t min_words = 5;        // for KeywordShare
  TzOffset tz = kDefaultTz;
};

/// Per-observation values of a metric falling inside the period.
std::vector<double> metric_observations(const Corpus& corpus, Metric metric, const Period& period,
                                        const CompareOptions& options = {});

struct PeriodComparison {
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  stats::WelchResult welch;
};

/// Throws UndefinedError when either period has fewer than two observations.
PeriodComparison period_compare(const Corpus& corpus, const Period& a, const Period& b, Metric metric,
                                const CompareOptions& options = {});

enum class DayClass { Weekday, Weekend };

struct HourlyProfile {
  std::size_t bucket_minutes = 60;
  std::vector<double> proportions;
  double nocturnal_share = 0;  // local time in [00:00, 05:00)
  std::size_t count = 0;
};

HourlyProfile hourly_profile(const Corpus& corpus, std::optional<Country> country, std::optional<DayClass> day_class,
                             std::size_t bucket_minutes = 60, TzOffset tz = kDefaultTz);

/// Per-message metric regressed on seconds since local midnight of the first corpus day.
stats::OlsFit falsification_trend(const Corpus& corpus, Metric metric, TzOffset tz = kDefaultTz);

struct UserDay {
  std::string user;
  LocalDate date;
  std::size_t messages = 0;
};

std::vector<UserDay> user_day_activity(const Corpus& corpus, TzOffset tz = kDefaultTz);

void write_series_csv(std::ostream& out, const DailySeries& series);
void write_profile_csv(std::ostream& out, const HourlyProfile& profile);
void write_comparison_csv(std::ostream& out, const std::vector<std::pair<std::string, PeriodComparison>>& rows);

}  // namespace chatlens::trends
