#include "chatlens/misinfo.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "chatlens/csv.hpp"
#include "chatlens/error.hpp"

namespace chatlens::misinfo {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view to_string(Label l) { return l == Label::FakeNews ? "fake_news" : "scam"; }
std::string_view to_string(Source s) { return s == Source::Factcheck ? "factcheck" : "manual"; }

Label parse_label(std::string_view s) {
  if (s == "fake_news") return Label::FakeNews;
  if (s == "scam") return Label::Scam;
  throw DataError("unknown label '" + std::string(s) + "'");
}

Source parse_source(std::string_view s) {
  if (s == "factcheck") return Source::Factcheck;
  if (s == "manual") return Source::Manual;
  throw DataError("unknown source '" + std::string(s) + "'");
}

std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::Pending: return "pending";
    case Decision::TruePositive: return "true_positive";
    case Decision::FalsePositive: return "false_positive";
  }
  return "pending";
}

Decision parse_decision(std::string_view s) {
  if (s == "pending") return Decision::Pending;
  if (s == "true_positive" || s == "tp") return Decision::TruePositive;
  if (s == "false_positive" || s == "fp") return Decision::FalsePositive;
  throw DataError("unknown decision '" + std::string(s) + "'");
}

LabeledCorpus::LabeledCorpus(std::vector<LabeledItem> items) : items_(std::move(items)) {
  std::set<std::string> ids;
  for (std::size_t i = 0; i < items_.size(); ++i) {
    auto& it = items_[i];
    if (!ids.insert(it.corpus_id).second) throw DataError("duplicate corpus_id '" + it.corpus_id + "'");
    if (it.tokens.empty()) it.tokens = text::tokenize(it.text);
    if (it.tokens.empty()) throw DataError("corpus item '" + it.corpus_id + "' has no tokens");
    by_text_.emplace(it.text, i);
  }
}

LabeledCorpus LabeledCorpus::parse(std::string_view jsonl) {
  std::vector<LabeledItem> items;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      json j = json::parse(line);
      LabeledItem it;
      it.corpus_id = j.at("corpus_id").get<std::string>();
      it.label = parse_label(j.at("label").get<std::string>());
      it.text = j.at("text").get<std::string>();
      it.source = parse_source(j.value("source", std::string("manual")));
      items.push_back(std::move(it));
    } catch (const json::exception& e) {
      throw DataError("labeled corpus line " + std::to_string(line_no) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError("labeled corpus line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return LabeledCorpus(std::move(items));
}

LabeledCorpus LabeledCorpus::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open labeled corpus " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse(ss.str());
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void LabeledCorpus::write(std::ostream& out) const {
  for (const auto& it : items_) {
    ordered_json j;
    j["corpus_id"] = it.corpus_id;
    j["label"] = std::string(to_string(it.label));
    j["text"] = it.text;
    j["source"] = std::string(to_string(it.source));
    out << j.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  }
}

const LabeledItem* LabeledCorpus::find_text(std::string_view text) const {
  auto it = by_text_.find(text);
  return it == by_text_.end() ? nullptr : &items_[it->second];
}

std::vector<MeaningfulText> meaningful_texts(const Corpus& corpus, std::size_t min_tokens) {
  std::vector<MeaningfulText> out;
  const auto& msgs = corpus.messages();
  for (std::size_t i = 0; i < msgs.size(); ++i) {
    if (msgs[i].kind != MessageKind::Text || !msgs[i].text) continue;
    auto tokens = text::tokenize(*msgs[i].text);
    if (tokens.size() >= min_tokens) out.push_back({i, std::move(tokens)});
  }
  return out;
}

std::map<std::string, Label> exact_matches(const Corpus& corpus, const LabeledCorpus& labeled,
                                           std::size_t min_tokens) {
  std::map<std::string, Label> out;
  for (const auto& mt : meaningful_texts(corpus, min_tokens)) {
    const Message& m = corpus.messages()[mt.index];
    if (const auto* item = labeled.find_text(*m.text)) out[m.id] = item->label;
  }
  return out;
}

std::vector<ReviewCandidate> score_candidates(const Corpus& corpus, const LabeledCorpus& labeled, double threshold,
                                              std::size_t min_tokens) {
  if (labeled.empty()) throw ArgumentError("candidate scoring needs a non-empty labeled corpus");
  auto texts = meaningful_texts(corpus, min_tokens);
  std::vector<text::TokenList> docs;
  docs.reserve(texts.size() + labeled.items().size());
  for (const auto& t : texts) docs.push_back(t.tokens);
  for (const auto& it : labeled.items()) docs.push_back(it.tokens);
  auto index = text::TfidfIndex::build(docs);

  std::vector<text::SparseVector> known;
  for (const auto& it : labeled.items()) known.push_back(index.vectorize(it.tokens));

  std::vector<ReviewCandidate> out;
  for (const auto& t : texts) {
    const Message& m = corpus.messages()[t.index];
    if (labeled.find_text(*m.text)) continue;
    auto v = index.vectorize(t.tokens);
    double best = -1;
    std::size_t best_i = 0;
    for (std::size_t k = 0; k < known.size(); ++k) {
      double c = text::cosine(v, known[k]);
      if (c > best) {
        best = c;
        best_i = k;
      }
    }
    if (best >= threshold) {
      const auto& item = labeled.items()[best_i];
      out.push_back({m.id, best, item.corpus_id, item.label, Decision::Pending});
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const ReviewCandidate& a, const ReviewCandidate& b) { return a.max_similarity > b.max_similarity; });
  return out;
}

DecisionOutcome apply_decisions(std::vector<ReviewCandidate> candidates,
                                const std::vector<std::pair<std::string, Decision>>& decisions) {
  std::map<std::string, std::vector<std::size_t>> by_id;
  for (std::size_t i = 0; i < candidates.size(); ++i) by_id[candidates[i].message_id].push_back(i);
  for (const auto& [id, d] : decisions) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw DataError("decision for unknown candidate '" + id + "'");
    for (std::size_t i : it->second) candidates[i].decision = d;
  }
  DecisionOutcome out;
  for (const auto& c : candidates) {
    if (c.decision == Decision::Pending) continue;
    if (c.decision == Decision::TruePositive) out.labeled[c.message_id] = c.label;
    out.reviewed.push_back(c);
  }
  return out;
}

std::vector<std::pair<std::string, Decision>> read_decisions_csv(const std::string& path) {
  auto table = csv::read_file(path);
  const std::size_t id_col = table.column("message_id");
  const std::size_t d_col = table.column("decision");
  std::vector<std::pair<std::string, Decision>> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    try {
      out.emplace_back(table.rows[r].at(id_col), parse_decision(table.rows[r].at(d_col)));
    } catch (const std::out_of_range&) {
      throw DataError(path + " row " + std::to_string(r + 2) + ": missing column");
    } catch (const DataError& e) {
      throw DataError(path + " row " + std::to_string(r + 2) + ": " + e.what());
    }
  }
  return out;
}

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

std::vector<VariantCluster> merge_variants(const Corpus& corpus, const std::vector<std::string>& message_ids,
                                           const text::TfidfIndex& index, double threshold) {
  std::vector<const Message*> msgs;
  std::vector<text::TokenList> tokens;
  std::vector<text::SparseVector> vecs;
  for (const auto& id : message_ids) {
    const Message* m = corpus.find(id);
    if (!m) throw DataError("unknown message id '" + id + "'");
    msgs.push_back(m);
    tokens.push_back(m->text ? text::tokenize(*m->text) : text::TokenList{});
    vecs.push_back(index.vectorize(tokens.back()));
  }
  const std::size_t n = msgs.size();
  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if ((!tokens[i].empty() && tokens[i] == tokens[j]) || text::cosine(vecs[i], vecs[j]) >= threshold) {
        uf.unite(i, j);
      }
    }
  }
  std::map<std::size_t, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < n; ++i) members[uf.find(i)].push_back(i);

  std::vector<VariantCluster> out;
  for (const auto& [root, idx] : members) {
    VariantCluster c;
    c.cluster_id = out.size();
    std::set<std::string> users, groups, seen_texts;
    std::size_t best_len = 0;
    bool have = false;
    for (std::size_t i : idx) {
      const Message& m = *msgs[i];
      c.message_ids.push_back(m.id);
      users.insert(m.sender.e164);
      groups.insert(m.group_uid);
      std::string t = m.text.value_or("");
      if (seen_texts.insert(t).second) c.texts.push_back(t);
      std::size_t len = text::utf8_length(t);
      if (!have || len > best_len) {
        best_len = len;
        c.canonical = t;
        have = true;
      }
    }
    c.n_shares = idx.size();
    c.n_users = users.size();
    c.n_groups = groups.size();
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<VariantCluster> merge_variants(const Corpus& corpus, const std::vector<std::string>& message_ids,
                                           double threshold, std::size_t min_tokens) {
  std::vector<text::TokenList> docs;
  for (auto& mt : meaningful_texts(corpus, min_tokens)) docs.push_back(std::move(mt.tokens));
  auto index = text::TfidfIndex::build(docs);
  return merge_variants(corpus, message_ids, index, threshold);
}

PrevalenceReport prevalence(const Corpus& corpus, const std::map<std::string, Label>& labeled, Label label,
                            std::size_t min_tokens) {
  struct Counts {
    std::size_t meaningful = 0, labeled = 0;
  };
  std::map<std::string, Counts> per_group, per_user;
  std::map<std::string, std::set<std::string>> sharers;
  for (const auto& mt : meaningful_texts(corpus, min_tokens)) {
    const Message& m = corpus.messages()[mt.index];
    auto& g = per_group[m.group_uid];
    auto& u = per_user[m.sender.e164];
    ++g.meaningful;
    ++u.meaningful;
    auto it = labeled.find(m.id);
    if (it != labeled.end() && it->second == label) {
      ++g.labeled;
      ++u.labeled;
      sharers[m.group_uid].insert(m.sender.e164);
    }
  }
  PrevalenceReport report;
  for (const auto& [uid, group] : corpus.groups()) {
    GroupPrevalence row;
    row.group_uid = uid;
    const Counts c = per_group.count(uid) ? per_group.at(uid) : Counts{};
    row.meaningful = c.meaningful;
    row.labeled = c.labeled;
    if (c.meaningful > 0) row.message_prevalence = double(c.labeled) / double(c.meaningful);
    row.members = corpus.group_members(uid).size();
    row.sharing_members = sharers.count(uid) ? sharers.at(uid).size() : 0;
    row.user_prevalence = row.members ? double(row.sharing_members) / double(row.members) : 0.0;
    report.groups.push_back(std::move(row));
  }
  for (const auto& [user, phone] : corpus.users()) {
    UserPrevalence row;
    row.user = user;
    const Counts c = per_user.count(user) ? per_user.at(user) : Counts{};
    row.meaningful = c.meaningful;
    row.labeled = c.labeled;
    if (c.meaningful > 0) row.prevalence = double(c.labeled) / double(c.meaningful);
    report.users.push_back(std::move(row));
  }
  return report;
}

void write_candidates_csv(std::ostream& out, const std::vector<ReviewCandidate>& rows) {
  csv::Writer w(out);
  w.header({"message_id", "max_similarity", "best_match", "label", "decision"});
  for (const auto& r : rows) {
    w << r.message_id << r.max_similarity << r.best_match_corpus_id << to_string(r.label) << to_string(r.decision);
    w.end_row();
  }
}

void write_labels_csv(std::ostream& out, const std::map<std::string, Label>& labels) {
  csv::Writer w(out);
  w.header({"message_id", "label"});
  for (const auto& [id, l] : labels) {
    w << id << to_string(l);
    w.end_row();
  }
}

std::map<std::string, Label> read_labels_csv(const std::string& path) {
  auto table = csv::read_file(path);
  const std::size_t id_col = table.column("message_id");
  const std::size_t l_col = table.column("label");
  std::map<std::string, Label> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() <= std::max(id_col, l_col)) throw DataError(path + " row " + std::to_string(r + 2) + ": missing column");
    try {
      out[row[id_col]] = parse_label(row[l_col]);
    } catch (const DataError& e) {
      throw DataError(path + " row " + std::to_string(r + 2) + ": " + e.what());
    }
  }
  return out;
}

void write_clusters_csv(std::ostream& out, const std::vector<VariantCluster>& rows) {
  csv::Writer w(out);
  w.header({"cluster_id", "n_variants", "n_shares", "n_users", "n_groups", "shares_per_user", "shares_per_group",
            "canonical"});
  for (const auto& r : rows) {
    w << r.cluster_id << r.texts.size() << r.n_shares << r.n_users << r.n_groups << r.shares_per_user()
      << r.shares_per_group() << r.canonical;
    w.end_row();
  }
}

void write_group_prevalence_csv(std::ostream& out, const std::vector<GroupPrevalence>& rows) {
  csv::Writer w(out);
  w.header({"group_uid", "meaningful", "labeled", "message_prevalence", "members", "sharing_members",
            "user_prevalence"});
  for (const auto& r : rows) {
    w << r.group_uid << r.meaningful << r.labeled << r.message_prevalence << r.members << r.sharing_members
      << r.user_prevalence;
    w.end_row();
  }
}

void write_user_prevalence_csv(std::ostream& out, const std::vector<UserPrevalence>& rows) {
  csv::Writer w(out);
  w.header({"user", "meaningful", "labeled", "prevalence"});
  for (const auto& r : rows) {
    w << r.user << r.meaningful << r.labeled << r.prevalence;
    w.end_row();
  }
}

}  // namespace chatlens::misinfo
