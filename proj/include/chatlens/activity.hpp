#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chatlens/corpus.hpp"

namespace chatlens::activity {

/// Per-sender message counts inside one group.
struct ShareDistribution {
  std::map<std::string, std::size_t> counts;
  std::size_t total = 0;

  /// One sender per entry, zero counts included.
  static ShareDistribution from_counts(const std::vector<std::size_t>& counts);
  std::vector<double> shares() const;
};

ShareDistribution share_distribution(const Corpus& corpus, std::string_view group_uid);

/// Messages per day over the inclusive calendar-day span of the group, in the
/// given local offset. Throws UndefinedError for groups without messages.
double activity_rate(const Corpus& corpus, std::string_view group_uid, TzOffset tz = kDefaultTz);

/// Herfindahl-Hirschman index: sum of squared shares.
double hh_concentration(const ShareDistribution& d);
/// Combined share of the five most active senders.
double top5_concentration(const ShareDistribution& d);
/// Discrete Gini over ascending counts, no small-sample correction.
double gini(const ShareDistribution& d);

/// Lorenz curve points (population share, cumulative message share), starting at (0,0).
std::vector<std::pair<double, double>> lorenz_curve(const ShareDistribution& d);

struct LengthFilter {
  std::optional<MessageKind> kind;
  std::optional<bool> forwarded;
  std::optional<std::string> group_uid;
};

struct Summary {
  std::size_t count = 0;
  double mean = 0;
  double p25 = 0, median = 0, p75 = 0, p90 = 0;
  double min = 0, max = 0;
};

/// Nearest-rank summary; an empty sample yields count 0 and zeros elsewhere.
Summary summarize(std::vector<double> values);

struct LengthStats {
  Summary words;       // text-bearing messages with non-empty text
  Summary characters;  // same population as words
  Summary media_seconds;
  std::size_t one_word_messages = 0;
};

LengthStats length_stats(const Corpus& corpus, const LengthFilter& filter = {});

/// Metrics of a group joined onto reshare records.
struct GroupCharacteristics {
  std::size_t size = 0;
  double entropy = 0;
  std::size_t degree = 0;
  double activity = 0;
  double hh = 0;
  double gini = 0;
};

struct ReshareRecord {
  std::string media_hash;
  MessageKind kind = MessageKind::Image;
  std::optional<std::int64_t> duration_s;  // part of the identity for video
  std::size_t n_shares = 0;
  std::size_t n_groups = 0;
  std::string first_group_uid;
  Timestamp first_time;
  Timestamp last_time;
  double span_hours = 0;
  GroupCharacteristics first_group;
};

/// Groups shares by identity (image: hash; video: hash and duration). The first
/// share is the earliest sent, ties broken by earlier read time.
std::vector<ReshareRecord> reshare_analysis(const Corpus& corpus, MessageKind kind,
                                            TzOffset tz = kDefaultTz);

struct GroupActivityRow {
  std::string group_uid;
  std::size_t messages = 0;
  double activity = 0;
  double hh = 0;
  double top5 = 0;
  double gini = 0;
};

std::vector<GroupActivityRow> activity_table(const Corpus& corpus, TzOffset tz = kDefaultTz);
void write_activity_csv(std::ostream& out, const std::vector<GroupActivityRow>& rows);
void write_reshare_csv(std::ostream& out, const std::vector<ReshareRecord>& rows);

}  // namespace chatlens::activity
