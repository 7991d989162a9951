#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "chatlens/corpus.hpp"
#include "chatlens/text.hpp"

namespace chatlens::misinfo {

enum class Label { FakeNews, Scam };
enum class Source { Factcheck, Manual };

std::string_view to_string(Label l);
std::string_view to_string(Source s);
Label parse_label(std::string_view s);
Source parse_source(std::string_view s);

struct LabeledItem {
  std::string corpus_id;
  Label label = Label::Scam;
  std::string text;
  text::TokenList tokens;
  Source source = Source::Manual;
};

class LabeledCorpus {
 public:
  LabeledCorpus() = default;
  /// Throws DataError on duplicate ids or texts that tokenize to nothing.
  explicit LabeledCorpus(std::vector<LabeledItem> items);

  /// JSON lines with corpus_id, label, text, source.
  static LabeledCorpus parse(std::string_view jsonl);
  static LabeledCorpus load(const std::string& path);
  void write(std::ostream& out) const;

  const std::vector<LabeledItem>& items() const { return items_; }
  bool empty() const { return items_.empty(); }
  const LabeledItem* find_text(std::string_view text) const;

 private:
  std::vector<LabeledItem> items_;
  std::map<std::string, std::size_t, std::less<>> by_text_;
};

struct MeaningfulText {
  std::size_t index = 0;  // into corpus.messages()
  text::TokenList tokens;
};

/// Text messages with at least `min_tokens` stemmed, stopword-free tokens.
std::vector<MeaningfulText> meaningful_texts(const Corpus& corpus, std::size_t min_tokens = 5);

enum class Decision { Pending, TruePositive, FalsePositive };
std::string_view to_string(Decision d);
Decision parse_decision(std::string_view s);

struct ReviewCandidate {
  std::string message_id;
  double max_similarity = 0;
  std::string best_match_corpus_id;
  Label label = Label::Scam;  // label of the best match
  Decision decision = Decision::Pending;
};

/// Messages whose text equals a labeled item exactly, with that item's label.
std::map<std::string, Label> exact_matches(const Corpus& corpus, const LabeledCorpus& labeled,
                                           std::size_t min_tokens = 5);

/// Candidates at or above the threshold, by descending similarity (ties in corpus
/// order). Messages matching a labeled text exactly are not candidates.
std::vector<ReviewCandidate> score_candidates(const Corpus& corpus, const LabeledCorpus& labeled,
                                              double threshold = 0.3, std::size_t min_tokens = 5);

struct DecisionOutcome {
  std::map<std::string, Label> labeled;  // true positives
  std::vector<ReviewCandidate> reviewed;  // candidates with a non-pending decision
};

/// Throws DataError for decisions naming a message that is not a candidate.
DecisionOutcome apply_decisions(std::vector<ReviewCandidate> candidates,
                                const std::vector<std::pair<std::string, Decision>>& decisions);
std::vector<std::pair<std::string, Decision>> read_decisions_csv(const std::string& path);

struct VariantCluster {
  std::size_t cluster_id = 0;
  std::vector<std::string> message_ids;
  std::vector<std::string> texts;  // distinct member texts, first-seen order
  std::string canonical;           // longest member, earliest on ties
  std::size_t n_shares = 0;
  std::size_t n_users = 0;
  std::size_t n_groups = 0;

  double shares_per_user() const { return n_users ? double(n_shares) / double(n_users) : 0.0; }
  double shares_per_group() const { return n_groups ? double(n_shares) / double(n_groups) : 0.0; }
};

/// Union-find over pairs with cosine >= threshold; identical token lists always
/// join. Weights come from `index`. Clusters are ordered by first member.
std::vector<VariantCluster> merge_variants(const Corpus& corpus, const std::vector<std::string>& message_ids,
                                           const text::TfidfIndex& index, double threshold = 0.8);
/// Same, with the index fit on all meaningful texts of the corpus.
std::vector<VariantCluster> merge_variants(const Corpus& corpus, const std::vector<std::string>& message_ids,
                                           double threshold = 0.8, std::size_t min_tokens = 5);

struct GroupPrevalence {
  std::string group_uid;
  std::size_t meaningful = 0;
  std::size_t labeled = 0;
  std::optional<double> message_prevalence;
  std::size_t members = 0;
  std::size_t sharing_members = 0;
  double user_prevalence = 0;
};

struct UserPrevalence {
  std::string user;
  std::size_t meaningful = 0;
  std::size_t labeled = 0;
  std::optional<double> prevalence;
};

struct PrevalenceReport {
  std::vector<GroupPrevalence> groups;
  std::vector<UserPrevalence> users;
};

/// Counts only messages carrying `label` in `labeled`.
PrevalenceReport prevalence(const Corpus& corpus, const std::map<std::string, Label>& labeled, Label label,
                            std::size_t min_tokens = 5);

void write_candidates_csv(std::ostream& out, const std::vector<ReviewCandidate>& rows);
void write_labels_csv(std::ostream& out, const std::map<std::string, Label>& labels);
std::map<std::string, Label> read_labels_csv(const std::string& path);
void write_clusters_csv(std::ostream& out, const std::vector<VariantCluster>& rows);
void write_group_prevalence_csv(std::ostream& out, const std::vector<GroupPrevalence>& rows);
void write_user_prevalence_csv(std::ostream& out, const std::vector<UserPrevalence>& rows);

}  // namespace chatlens::misinfo
