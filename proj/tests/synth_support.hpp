#pragma once

// Helpers that replay generated logs through ingestion and compare with the
// generator's ground truth.

#include <map>
#include <set>
#include <sstream>
#include <string>

#include "chatlens/ingest.hpp"
#include "chatlens/synth.hpp"

namespace chatlens::testing {

inline ingest::ReadResult read_generated(const synth::Generated& g) {
  ingest::ReadResult all;
  for (const auto& [server, lines] : g.logs) {
    std::ostringstream joined;
    for (const auto& l : lines) joined << l << '\n';
    std::istringstream in(joined.str());
    auto part = ingest::read_log_stream(in, "server_" + server + ".jsonl");
    for (auto& r : part.records) all.records.push_back(std::move(r));
    for (auto& r : part.rejects) all.rejects.push_back(std::move(r));
  }
  return all;
}

inline std::vector<Message> messages_of(const std::vector<ingest::RawRecord>& records) {
  std::vector<Message> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.message);
  return out;
}

/// Keys the deduplicated corpus should hold before renamed groups are merged:
/// every true message under each uid it was read with.
inline std::map<ingest::DuplicateKey, std::size_t> expected_premerge_keys(const synth::GroundTruth& truth) {
  std::map<std::string, std::pair<const synth::RenameEvent*, bool>> renamed;  // id -> (event, also read before)
  for (const auto& ev : truth.renames) {
    for (const auto& id : ev.reread_ids) renamed[id] = {&ev, true};
    for (const auto& id : ev.unread_before_ids) renamed[id] = {&ev, false};
  }
  std::map<ingest::DuplicateKey, std::size_t> out;
  for (const auto& tm : truth.messages) {
    auto key = ingest::duplicate_key(tm.message);
    if (!key) continue;
    auto it = renamed.find(tm.message.id);
    if (it == renamed.end() || it->second.second) ++out[*key];
    if (it != renamed.end()) {
      key->group_uid = it->second.first->new_uid;
      ++out[*key];
    }
  }
  return out;
}

/// Keys after merging: every true message under its group's original uid.
inline std::map<ingest::DuplicateKey, std::size_t> expected_merged_keys(const synth::GroundTruth& truth) {
  std::map<std::string, std::string> original;
  for (const auto& ev : truth.renames) original[ev.new_uid] = ev.old_uid;
  std::map<ingest::DuplicateKey, std::size_t> out;
  for (const auto& tm : truth.messages) {
    auto key = ingest::duplicate_key(tm.message);
    if (!key) continue;
    if (auto it = original.find(key->group_uid); it != original.end()) key->group_uid = it->second;
    ++out[*key];
  }
  return out;
}

struct RenameScore {
  std::size_t expected = 0;
  std::size_t found = 0;
  std::size_t false_merges = 0;
};

/// Compares merge decisions with the rename events; only renames whose new uid
/// was actually read can be detected.
inline RenameScore score_renames(const synth::GroundTruth& truth, const ingest::MergeReport& report,
                                 const std::set<std::string>& read_uids) {
  std::set<std::pair<std::string, std::string>> truth_pairs;
  RenameScore s;
  for (const auto& ev : truth.renames) {
    if (!read_uids.count(ev.new_uid) || !read_uids.count(ev.old_uid)) continue;
    truth_pairs.insert({ev.new_uid, ev.old_uid});
    ++s.expected;
  }
  for (const auto& m : report.merges) {
    if (truth_pairs.count({m.absorbed_uid, m.surviving_uid})) {
      ++s.found;
    } else {
      ++s.false_merges;
    }
  }
  return s;
}

}  // namespace chatlens::testing
