#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chatlens/corpus.hpp"

namespace chatlens::ingest {

/// One validated line of a message log, before deduplication.
struct RawRecord {
  Message message;
  std::optional<std::string> group_title;
  std::optional<std::string> group_icon_uid;
  std::string file;
  std::size_t line_no = 0;
};

struct Reject {
  std::size_t line_no = 0;
  std::string file;
  std::string reason;
};

struct ReadResult {
  std::vector<RawRecord> records;
  std::vector<Reject> rejects;
};

/// Parses one log line. Throws DataError naming the offending field.
RawRecord parse_record(std::string_view line, const CountryTable& table = CountryTable::builtin());

/// Reads line-delimited records from each file in order. Blank lines are
/// skipped; malformed lines are collected as rejects. A file that cannot be
/// opened is reported as a reject with line number 0.
ReadResult read_logs(std::span<const std::string> paths,
                     const CountryTable& table = CountryTable::builtin());
ReadResult read_log_stream(std::istream& in, const std::string& name,
                           const CountryTable& table = CountryTable::builtin());

void write_rejects_csv(std::ostream& out, std::span<const Reject> rejects);

/// Serializes a message in the log line format (no trailing newline).
std::string to_log_line(const Message& m, const Group* group, TzOffset tz = TzOffset{0});

struct GroupDedupCounts {
  std::size_t read = 0;
  std::size_t removed = 0;
};

struct DedupReport {
  std::size_t total_read = 0;
  std::size_t removed = 0;
  std::size_t true_duplicates_kept = 0;
  std::map<std::string, GroupDedupCounts> per_group;
};

struct DedupResult {
  Corpus corpus;
  DedupReport report;
};

/// Duplicate key: group, sender, sent minute, and content identity.
struct DuplicateKey {
  std::string group_uid;
  std::string sender;
  std::int64_t minute = 0;
  std::string content;

  friend auto operator<=>(const DuplicateKey&, const DuplicateKey&) = default;
};

/// Nullopt when the message has no content identity and never matches another.
std::optional<DuplicateKey> duplicate_key(const Message& m);

/// Keeps, for every duplicate key, as many instances as the largest count seen
/// within a single (server, read_time) reading. The kept instances all come
/// from the earliest reading that attains that count. Output is ordered by
/// sent time, ties by input position.
std::pair<std::vector<Message>, DedupReport> dedup_messages(std::vector<Message> messages);

/// dedup_messages plus group metadata collected from the records.
DedupResult dedup(std::span<const RawRecord> records);

struct MergeEntry {
  std::string absorbed_uid;
  std::string surviving_uid;
  double cosine = 0;
  double identical_fraction = 0;
};

struct MergeReport {
  std::vector<MergeEntry> merges;
};

enum class GroupWeighting { Tfidf, Counts };

struct MergeOptions {
  double min_cosine = 0.5;              // strict: cosine must exceed this
  double min_identical_fraction = 0.6;  // inclusive
  GroupWeighting weighting = GroupWeighting::Tfidf;
};

/// Cosine between per-group token vectors, and the identical-message fraction
/// used by the merge rule. Exposed for diagnostics and tests.
struct GroupPairScore {
  double cosine = 0;
  std::size_t identical = 0;
  double identical_fraction = 0;
};
std::map<std::pair<std::string, std::string>, GroupPairScore> score_group_pairs(
    const Corpus& corpus, const MergeOptions& options = {});

/// Merges groups whose uid changed, re-deduplicating after each round until no
/// pair qualifies. The survivor is the group first read earliest.
std::pair<Corpus, MergeReport> resolve_group_variants(const Corpus& corpus,
                                                      const MergeOptions& options = {});

void write_dedup_report_csv(std::ostream& out, const DedupReport& report);
void write_merge_report_csv(std::ostream& out, const MergeReport& report);

/// Canonical corpus: messages in the log line format plus a group sidecar with
/// one JSON object per group (uid, title, icon_uid, merged_from).
void write_corpus(const Corpus& corpus, std::ostream& messages, std::ostream& groups,
                  TzOffset tz = TzOffset{0});
Corpus read_corpus(const std::string& messages_path, const std::string& groups_path,
                   const CountryTable& table = CountryTable::builtin());

}  // namespace chatlens::ingest
