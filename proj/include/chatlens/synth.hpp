#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "chatlens/corpus.hpp"
#include "chatlens/misinfo.hpp"

namespace chatlens::synth {

/// Generator parameters. Every rate is a probability in [0, 1].
struct GenConfig {
  std::uint64_t seed = 42;
  std::size_t n_groups = 30;
  double size_exponent = 2.0;  // Pareto tail of group sizes
  std::size_t min_group_size = 6;
  std::size_t max_group_size = 80;
  double cross_membership = 0.15;  // chance a member slot reuses a user from another group
  std::size_t icon_percent = 70;   // share of groups carrying an icon uid

  std::string start_date = "2020-02-20";
  std::size_t n_days = 53;
  int tz_offset_minutes = -300;
  double messages_per_member_day = 0.25;
  double sender_skew = 0.9;  // Zipf exponent of per-member activity

  double p_image = 0.12;
  double p_video = 0.05;
  double p_audio = 0.08;
  double forward_rate = 0.15;
  double emoji_rate = 0.1;
  double reshare_rate = 0.3;  // media reusing an earlier hash

  double reply_probability = 0.2;
  double reply_to_reply = 0.4;
  double missing_parent_rate = 0.05;
  std::int64_t reply_window_minutes = 240;

  double true_duplicate_rate = 0.01;
  double read_interval_hours = 6;
  double rescroll_overlap = 0.3;  // fraction of the interval re-read by the next reading
  double server_lag_hours = 1.5;

  std::size_t n_rename_events = 2;
  double rename_overlap = 0.8;

  std::size_t n_scam_templates = 5;
  std::size_t n_fake_templates = 3;
  std::size_t variants_per_template = 3;
  std::size_t mutation_rate = 1;  // words substituted per non-original variant
  std::size_t instances_per_template = 12;

  std::string keyword = "trochas";
  double keyword_base_rate = 0.01;
  double keyword_spike_rate = 0.12;
  double keyword_spike_at = 0.6;  // fraction of the window

  /// Throws ArgumentError on out-of-range values.
  void validate() const;
  static GenConfig from_json_text(std::string_view text);
  std::string to_json_text() const;
  /// A few hundred messages; used by the oracle tests.
  static GenConfig small(std::uint64_t seed);
};

/// 64-bit Mersenne Twister with fixed conversions so streams are reproducible
/// from the raw engine outputs alone.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  /// [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  /// [0, n) by rejection.
  std::uint64_t below(std::uint64_t n);
  bool chance(double p) { return uniform() < p; }
  std::size_t weighted(const std::vector<double>& weights);
  std::uint64_t poisson(double lambda);

 private:
  std::mt19937_64 engine_;
};

struct TrueMessage {
  Message message;  // group_uid is the uid in force when sent; provenance unset
  std::size_t group_index = 0;
};

struct RenameEvent {
  std::size_t group_index = 0;
  std::string old_uid;
  std::string new_uid;
  Timestamp at;
  std::vector<std::string> reread_ids;  // pre-rename messages read under both uids
  std::vector<std::string> unread_before_ids;  // pre-rename messages first read under the new uid
};

struct PlantedMisinfo {
  std::size_t template_id = 0;
  std::size_t variant_id = 0;
  std::string message_id;
  misinfo::Label label = misinfo::Label::Scam;
  std::string text;
  std::string template_text;
};

struct GroundTruth {
  std::vector<TrueMessage> messages;  // chronological
  std::vector<std::vector<std::string>> true_duplicate_sets;
  std::size_t emitted_records = 0;
  std::size_t read_duplicates = 0;  // emitted records beyond the first sighting of each message
  std::vector<RenameEvent> renames;
  std::vector<PlantedMisinfo> planted;
  std::vector<std::string> missing_parent_replies;
  LocalDate keyword_spike_date;
};

struct Generated {
  std::map<std::string, std::vector<std::string>> logs;  // server -> log lines
  GroundTruth truth;
  misinfo::LabeledCorpus labeled;
};

Generated generate(const GenConfig& config);

std::string ground_truth_json(const Generated& g, const GenConfig& config);

/// logs/server_<name>.jsonl, ground_truth.json, labeled_corpus.jsonl,
/// truth_labels.csv and config.json under `dir`.
void write_generated(const Generated& g, const GenConfig& config, const std::string& dir);

}  // namespace chatlens::synth
