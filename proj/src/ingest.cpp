#include "chatlens/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "chatlens/csv.hpp"
#include "chatlens/error.hpp"
#include "chatlens/text.hpp"

namespace chatlens::ingest {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

std::optional<std::string> optional_string(const json& obj, const char* field) {
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw DataError(std::string("field '") + field + "' must be a string");
  return it->get<std::string>();
}

std::string required_string(const json& obj, const char* field) {
  auto v = optional_string(obj, field);
  if (!v) throw DataError(std::string("missing required field '") + field + "'");
  return *v;
}

bool optional_bool(const json& obj, const char* field) {
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) return false;
  if (!it->is_boolean()) throw DataError(std::string("field '") + field + "' must be a boolean");
  return it->get<bool>();
}

Timestamp required_time(const json& obj, const char* field) {
  auto s = required_string(obj, field);
  auto t = parse_iso8601(s);
  if (!t) throw DataError(std::string("field '") + field + "' is not ISO-8601: '" + s + "'");
  return *t;
}

std::string dump_line(const ordered_json& j) {
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

template <typename T>
ordered_json nullable(const std::optional<T>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

}  // namespace

RawRecord parse_record(std::string_view line, const CountryTable& table) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("invalid JSON: ") + e.what());
  }
  if (!obj.is_object()) throw DataError("record is not a JSON object");

  RawRecord rec;
  Message& m = rec.message;
  m.id = required_string(obj, "id");
  if (m.id.empty()) throw DataError("field 'id' is empty");
  rec.group_title = optional_string(obj, "group_title");
  rec.group_icon_uid = optional_string(obj, "group_icon_uid");
  if (rec.group_icon_uid && rec.group_icon_uid->find("://") != std::string::npos) {
    rec.group_icon_uid = parse_uid_from_icon_url(*rec.group_icon_uid);
  }
  if (auto uid = optional_string(obj, "group_uid"); uid && !uid->empty()) {
    m.group_uid = *uid;
  } else {
    m.group_uid = derive_uid(rec.group_icon_uid, rec.group_title.value_or(""));
  }
  m.provenance.server = required_string(obj, "server");
  m.provenance.read_time = required_time(obj, "read_time");
  m.sent_time = required_time(obj, "sent_time").truncated_to_minute();
  if (m.sent_time > m.provenance.read_time) throw DataError("sent_time is after read_time");
  m.sender = parse_phone(required_string(obj, "sender"), table);

  auto kind_text = required_string(obj, "kind");
  auto kind = parse_message_kind(kind_text);
  if (!kind) throw DataError("unknown kind '" + kind_text + "'");
  m.kind = *kind;
  m.text = optional_string(obj, "text");
  if (m.kind == MessageKind::Text && !m.text) throw DataError("text message without text");
  m.media_hash = optional_string(obj, "media_hash");
  if (auto it = obj.find("media_duration_s"); it != obj.end() && !it->is_null()) {
    if (!it->is_number_integer() || it->get<std::int64_t>() < 0) {
      throw DataError("field 'media_duration_s' must be a non-negative integer");
    }
    if (m.kind != MessageKind::Audio && m.kind != MessageKind::Video) {
      throw DataError("media_duration_s is only valid for audio and video");
    }
    m.media_duration_s = it->get<std::int64_t>();
  }
  m.has_emoji = optional_bool(obj, "has_emoji");
  m.forwarded = optional_bool(obj, "forwarded");
  m.reply_to = optional_string(obj, "reply_to");
  if (m.reply_to && m.reply_to->empty()) m.reply_to.reset();
  return rec;
}

ReadResult read_log_stream(std::istream& in, const std::string& name, const CountryTable& table) {
  ReadResult out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      RawRecord rec = parse_record(line, table);
      rec.file = name;
      rec.line_no = line_no;
      out.records.push_back(std::move(rec));
    } catch (const Error& e) {
      out.rejects.push_back({line_no, name, e.what()});
    }
  }
  return out;
}

ReadResult read_logs(std::span<const std::string> paths, const CountryTable& table) {
  ReadResult all;
  for (const auto& path : paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      all.rejects.push_back({0, path, "cannot open file"});
      continue;
    }
    ReadResult one = read_log_stream(in, path, table);
    std::move(one.records.begin(), one.records.end(), std::back_inserter(all.records));
    std::move(one.rejects.begin(), one.rejects.end(), std::back_inserter(all.rejects));
  }
  return all;
}

void write_rejects_csv(std::ostream& out, std::span<const Reject> rejects) {
  csv::Writer w(out);
  w.header({"line_no", "file", "reason"});
  for (const auto& r : rejects) {
    w << r.line_no << r.file << r.reason;
    w.end_row();
  }
}

std::string to_log_line(const Message& m, const Group* group, TzOffset tz) {
  ordered_json j;
  j["id"] = m.id;
  j["group_uid"] = m.group_uid;
  j["group_title"] = group ? nullable(group->title) : ordered_json(nullptr);
  j["group_icon_uid"] = group ? nullable(group->icon_uid) : ordered_json(nullptr);
  j["server"] = m.provenance.server;
  j["read_time"] = format_iso8601(m.provenance.read_time, tz);
  j["sent_time"] = format_iso8601_minutes(m.sent_time, tz);
  j["sender"] = "+" + m.sender.e164;
  j["kind"] = std::string(to_string(m.kind));
  j["text"] = nullable(m.text);
  j["media_hash"] = nullable(m.media_hash);
  j["media_duration_s"] = nullable(m.media_duration_s);
  j["has_emoji"] = m.has_emoji;
  j["forwarded"] = m.forwarded;
  j["reply_to"] = nullable(m.reply_to);
  return dump_line(j);
}

std::optional<DuplicateKey> duplicate_key(const Message& m) {
  auto content = content_identity(m);
  if (!content) return std::nullopt;
  return DuplicateKey{m.group_uid, m.sender.e164, m.sent_time.minutes(), std::move(*content)};
}

std::pair<std::vector<Message>, DedupReport> dedup_messages(std::vector<Message> messages) {
  DedupReport report;
  report.total_read = messages.size();

  // key -> reading -> positions in input order
  std::map<DuplicateKey, std::map<Provenance, std::vector<std::size_t>>> readings;
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < messages.size(); ++i) {
    ++report.per_group[messages[i].group_uid].read;
    if (auto key = duplicate_key(messages[i])) {
      readings[*key][messages[i].provenance].push_back(i);
    } else {
      keep.push_back(i);
    }
  }
  for (const auto& [key, by_reading] : readings) {
    const std::vector<std::size_t>* best = nullptr;
    for (const auto& [prov, positions] : by_reading) {
      if (!best || positions.size() > best->size()) best = &positions;
    }
    keep.insert(keep.end(), best->begin(), best->end());
    report.true_duplicates_kept += best->size() - 1;
  }
  std::sort(keep.begin(), keep.end(), [&](std::size_t a, std::size_t b) {
    if (messages[a].sent_time != messages[b].sent_time) return messages[a].sent_time < messages[b].sent_time;
    return a < b;
  });

  std::vector<Message> out;
  out.reserve(keep.size());
  for (std::size_t i : keep) out.push_back(std::move(messages[i]));
  report.removed = report.total_read - out.size();
  std::map<std::string, std::size_t> kept_per_group;
  for (const auto& m : out) ++kept_per_group[m.group_uid];
  for (auto& [uid, counts] : report.per_group) counts.removed = counts.read - kept_per_group[uid];
  return {std::move(out), std::move(report)};
}

DedupResult dedup(std::span<const RawRecord> records) {
  // Metadata comes from the earliest reading that supplies it.
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return records[a].message.provenance < records[b].message.provenance;
  });
  std::map<std::string, Group> groups;
  for (std::size_t i : order) {
    const RawRecord& r = records[i];
    Group& g = groups[r.message.group_uid];
    g.uid = r.message.group_uid;
    if (!g.title && r.group_title) g.title = r.group_title;
    if (!g.icon_uid && r.group_icon_uid) g.icon_uid = r.group_icon_uid;
  }
  std::vector<Message> messages;
  messages.reserve(records.size());
  for (const auto& r : records) messages.push_back(r.message);
  auto [kept, report] = dedup_messages(std::move(messages));
  return {Corpus(std::move(groups), std::move(kept)), std::move(report)};
}

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
};

std::string identity_string(const Message& m) {
  auto c = content_identity(m);
  if (!c) return {};
  return m.sender.e164 + '\x1f' + std::to_string(m.sent_time.minutes()) + '\x1f' + *c;
}

struct GroupView {
  std::string uid;
  std::size_t message_count = 0;
  Timestamp first_read;
  std::vector<std::string> identities;  // sorted multiset
  text::SparseVector vector;
};

std::vector<GroupView> group_views(const Corpus& corpus, const MergeOptions& options,
                                   std::unordered_map<std::string, text::TokenList>& token_cache) {
  std::vector<GroupView> views;
  std::vector<text::TokenList> docs;
  for (const auto& [uid, g] : corpus.groups()) {
    GroupView v;
    v.uid = uid;
    text::TokenList doc;
    bool first = true;
    for (std::size_t i : corpus.group_message_indices(uid)) {
      const Message& m = corpus.messages()[i];
      ++v.message_count;
      if (first || m.provenance.read_time < v.first_read) v.first_read = m.provenance.read_time;
      first = false;
      if (auto id = identity_string(m); !id.empty()) v.identities.push_back(std::move(id));
      if (m.text) {
        auto it = token_cache.find(*m.text);
        if (it == token_cache.end()) it = token_cache.emplace(*m.text, text::tokenize(*m.text)).first;
        doc.insert(doc.end(), it->second.begin(), it->second.end());
      }
    }
    std::sort(v.identities.begin(), v.identities.end());
    views.push_back(std::move(v));
    docs.push_back(std::move(doc));
  }
  auto index = text::TfidfIndex::build(docs);
  for (std::size_t i = 0; i < views.size(); ++i) {
    if (options.weighting == GroupWeighting::Tfidf) {
      views[i].vector = index.vectorize(docs[i]);
    } else {
      // Raw counts: same vocabulary, weight = occurrences.
      std::map<std::uint32_t, double> counts;
      for (const auto& t : docs[i]) counts[*index.dimension(t)] += 1.0;
      views[i].vector.entries.assign(counts.begin(), counts.end());
    }
  }
  return views;
}

std::size_t multiset_intersection(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

GroupPairScore score_pair(const GroupView& a, const GroupView& b, const MergeOptions& options) {
  GroupPairScore s;
  s.cosine = text::cosine(a.vector, b.vector);
  if (s.cosine > options.min_cosine) {
    s.identical = multiset_intersection(a.identities, b.identities);
    std::size_t denom = std::min(a.message_count, b.message_count);
    s.identical_fraction = denom == 0 ? 0.0 : static_cast<double>(s.identical) / static_cast<double>(denom);
  }
  return s;
}

bool earlier(const GroupView& a, const GroupView& b) {
  if (a.first_read != b.first_read) return a.first_read < b.first_read;
  return a.uid < b.uid;
}

}  // namespace

std::map<std::pair<std::string, std::string>, GroupPairScore> score_group_pairs(
    const Corpus& corpus, const MergeOptions& options) {
  std::unordered_map<std::string, text::TokenList> cache;
  auto views = group_views(corpus, options, cache);
  std::map<std::pair<std::string, std::string>, GroupPairScore> out;
  for (std::size_t i = 0; i < views.size(); ++i) {
    for (std::size_t j = i + 1; j < views.size(); ++j) {
      out[{views[i].uid, views[j].uid}] = score_pair(views[i], views[j], options);
    }
  }
  return out;
}

std::pair<Corpus, MergeReport> resolve_group_variants(const Corpus& input, const MergeOptions& options) {
  Corpus corpus = input;
  MergeReport report;
  std::unordered_map<std::string, text::TokenList> cache;
  std::map<std::string, std::string> moved_to;  // absorbed uid -> survivor of its round

  while (true) {
    auto views = group_views(corpus, options, cache);
    UnionFind uf(views.size());
    std::vector<MergeEntry> round;
    for (std::size_t i = 0; i < views.size(); ++i) {
      for (std::size_t j = i + 1; j < views.size(); ++j) {
        GroupPairScore s = score_pair(views[i], views[j], options);
        if (s.cosine <= options.min_cosine || s.identical_fraction < options.min_identical_fraction) continue;
        std::size_t ri = uf.find(i);
        std::size_t rj = uf.find(j);
        if (ri == rj) continue;
        // Roots are always the earliest-read member of their set.
        auto [survivor, absorbed] = earlier(views[ri], views[rj]) ? std::pair{ri, rj} : std::pair{rj, ri};
        uf.parent[absorbed] = survivor;
        round.push_back({views[absorbed].uid, views[survivor].uid, s.cosine, s.identical_fraction});
      }
    }
    if (round.empty()) break;

    std::map<std::string, std::string> remap;
    for (std::size_t i = 0; i < views.size(); ++i) {
      std::size_t r = uf.find(i);
      if (r != i) remap[views[i].uid] = views[r].uid;
    }
    std::map<std::string, Group> groups = corpus.groups();
    for (const auto& [from, to] : remap) {
      Group& survivor = groups.at(to);
      const Group& absorbed = groups.at(from);
      std::set<std::string> merged(survivor.merged_from.begin(), survivor.merged_from.end());
      merged.insert(from);
      merged.insert(absorbed.merged_from.begin(), absorbed.merged_from.end());
      survivor.merged_from.assign(merged.begin(), merged.end());
      if (!survivor.title) survivor.title = absorbed.title;
      if (!survivor.icon_uid) survivor.icon_uid = absorbed.icon_uid;
      moved_to[from] = to;
    }
    for (const auto& [from, to] : remap) groups.erase(from);
    std::vector<Message> messages = corpus.messages();
    for (auto& m : messages) {
      if (auto it = remap.find(m.group_uid); it != remap.end()) m.group_uid = it->second;
    }
    auto deduped = dedup_messages(std::move(messages)).first;
    corpus = Corpus(std::move(groups), std::move(deduped));
    std::move(round.begin(), round.end(), std::back_inserter(report.merges));
  }

  for (auto& entry : report.merges) {
    std::string uid = entry.surviving_uid;
    for (auto it = moved_to.find(uid); it != moved_to.end(); it = moved_to.find(uid)) uid = it->second;
    entry.surviving_uid = uid;
  }
  return {std::move(corpus), std::move(report)};
}

void write_dedup_report_csv(std::ostream& out, const DedupReport& report) {
  csv::Writer w(out);
  w.header({"group_uid", "read", "removed", "kept"});
  for (const auto& [uid, c] : report.per_group) {
    w << uid << c.read << c.removed << (c.read - c.removed);
    w.end_row();
  }
  w << "*" << report.total_read << report.removed << (report.total_read - report.removed);
  w.end_row();
}

void write_merge_report_csv(std::ostream& out, const MergeReport& report) {
  csv::Writer w(out);
  w.header({"absorbed_uid", "surviving_uid", "cosine", "identical_fraction"});
  for (const auto& m : report.merges) {
    w << m.absorbed_uid << m.surviving_uid << m.cosine << m.identical_fraction;
    w.end_row();
  }
}

void write_corpus(const Corpus& corpus, std::ostream& messages, std::ostream& groups, TzOffset tz) {
  for (const auto& m : corpus.messages()) {
    messages << to_log_line(m, &corpus.group(m.group_uid), tz) << '\n';
  }
  for (const auto& [uid, g] : corpus.groups()) {
    ordered_json j;
    j["uid"] = g.uid;
    j["title"] = nullable(g.title);
    j["icon_uid"] = nullable(g.icon_uid);
    j["merged_from"] = g.merged_from;
    groups << dump_line(j) << '\n';
  }
}

Corpus read_corpus(const std::string& messages_path, const std::string& groups_path,
                   const CountryTable& table) {
  std::ifstream gin(groups_path, std::ios::binary);
  if (!gin) throw DataError("cannot open " + groups_path);
  std::map<std::string, Group> groups;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(gin, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      json j = json::parse(line);
      Group g;
      g.uid = required_string(j, "uid");
      g.title = optional_string(j, "title");
      g.icon_uid = optional_string(j, "icon_uid");
      if (auto it = j.find("merged_from"); it != j.end() && !it->is_null()) {
        g.merged_from = it->get<std::vector<std::string>>();
      }
      groups[g.uid] = std::move(g);
    } catch (const std::exception& e) {
      throw DataError(groups_path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  std::ifstream min(messages_path, std::ios::binary);
  if (!min) throw DataError("cannot open " + messages_path);
  ReadResult rr = read_log_stream(min, messages_path, table);
  if (!rr.rejects.empty()) {
    const Reject& r = rr.rejects.front();
    throw DataError(r.file + ":" + std::to_string(r.line_no) + ": " + r.reason);
  }
  std::vector<Message> messages;
  messages.reserve(rr.records.size());
  for (auto& r : rr.records) messages.push_back(std::move(r.message));
  return Corpus(std::move(groups), std::move(messages));
}

}  // namespace chatlens::ingest
