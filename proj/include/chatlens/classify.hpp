#pragma once

#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chatlens/corpus.hpp"
#include "chatlens/text.hpp"

namespace chatlens::classify {

enum class Label { NotScam, Scam };
std::string_view to_string(Label l);
Label parse_label(std::string_view s);

struct Row {
  std::string id;
  Timestamp sent;
  text::TokenList tokens;
  double word_count = 0;
  Country country = Country::Unknown;
  double group_hh = 0;
  double group_gini = 0;
  Label label = Label::NotScam;
};

/// Rows in chronological order, ties by id.
struct Dataset {
  std::vector<Row> rows;

  std::size_t size() const { return rows.size(); }
  Dataset slice(std::size_t begin, std::size_t end) const;
  void sort();
};

/// Meaningful text messages of the corpus; ids in `scam_ids` are labeled scam.
Dataset build_dataset(const Corpus& corpus, const std::set<std::string>& scam_ids, std::size_t min_tokens = 5);

/// First floor(fraction * n) rows train, the rest test. The cut moves forward
/// past rows sharing the boundary timestamp so no training row is as late as
/// the first test row (backward when that would empty the test side).
std::pair<Dataset, Dataset> chrono_split(const Dataset& ds, double train_fraction = 0.8);

struct Fold {
  std::size_t train_end = 0;  // train rows are [0, train_end)
  std::size_t test_begin = 0;
  std::size_t test_end = 0;
};

struct FoldPlan {
  std::vector<Fold> folds;
};

/// k chronological blocks of size floor(n/k), remainder to the last block;
/// fold i trains on blocks 1..i and tests on block i+1. Block edges are nudged
/// off timestamp ties the same way as chrono_split.
FoldPlan forward_chain_folds(const Dataset& train, std::size_t k = 5);

/// True when every training row of the fold is strictly earlier than its first test row.
bool fold_is_chronological(const Dataset& ds, const Fold& fold);

struct FeatureSpec {
  bool word_count = false;
  bool country = false;
  bool group_concentration = false;
};

/// TF-IDF tokens plus trailing dense extras, fit on training rows only.
class Featurizer {
 public:
  static Featurizer fit(std::span<const Row> train, const FeatureSpec& spec);

  text::SparseVector transform(const Row& row) const;
  std::size_t dimension() const;
  const text::TfidfIndex& vocabulary() const { return index_; }
  const FeatureSpec& spec() const { return spec_; }

 private:
  text::TfidfIndex index_;
  FeatureSpec spec_;
  double wc_min_ = 0;
  double wc_max_ = 0;
};

struct Matrix {
  std::vector<text::SparseVector> x;
  std::vector<Label> y;
  std::size_t dims = 0;
};

Matrix featurize(const Featurizer& f, std::span<const Row> rows);

class KnnClassifier {
 public:
  KnnClassifier(Matrix train, std::size_t k);
  /// Majority of the k nearest by 1 - cosine; distance ties go to the earlier
  /// training row, vote ties to scam.
  Label predict(const text::SparseVector& query) const;

 private:
  Matrix train_;
  std::size_t k_;
  std::vector<double> norms_;
  std::vector<std::vector<std::pair<std::size_t, double>>> postings_;
};

class DecisionTree {
 public:
  struct Node {
    bool leaf = true;
    Label label = Label::Scam;
    std::uint32_t feature = 0;
    double threshold = 0;
    std::size_t left = 0;
    std::size_t right = 0;
    std::size_t samples = 0;
    double impurity = 0;
  };

  /// CART with Gini impurity; x <= threshold goes left.
  static DecisionTree train(const Matrix& data, std::size_t max_depth);
  Label predict(const text::SparseVector& x) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t depth() const;

 private:
  std::vector<Node> nodes_;
};

struct SplitChoice {
  std::uint32_t feature = 0;
  double threshold = 0;
  double impurity = 0;  // weighted child impurity
};

double gini_impurity(std::size_t scam, std::size_t total);
/// Best single-feature threshold split over `samples`; nullopt when no
/// threshold separates any two values. Ties: lowest feature, then lowest threshold.
std::optional<SplitChoice> best_split(const Matrix& data, std::span<const std::size_t> samples);

struct LogisticOptions {
  double C = 1.0;
  std::size_t max_iter = 500;
  double tol = 1e-6;
};

struct Objective {
  double loss = 0;
  std::vector<double> grad_w;
  double grad_b = 0;
};

/// Mean log-loss plus ||w||^2 / (2 C n); the bias is not penalized.
Objective logistic_objective(const Matrix& data, std::span<const double> w, double b, double C);

class LogisticModel {
 public:
  static LogisticModel train(const Matrix& data, const LogisticOptions& options);

  double probability(const text::SparseVector& x) const;
  Label predict(const text::SparseVector& x) const { return probability(x) >= 0.5 ? Label::Scam : Label::NotScam; }

  const std::vector<double>& weights() const { return w_; }
  double bias() const { return b_; }
  bool converged() const { return converged_; }
  std::size_t iterations() const { return iterations_; }
  const std::vector<double>& loss_history() const { return loss_history_; }

 private:
  std::vector<double> w_;
  double b_ = 0;
  bool converged_ = false;
  std::size_t iterations_ = 0;
  std::vector<double> loss_history_;
};

struct EvalReport {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  std::optional<double> recall;
  std::optional<double> precision;

  static EvalReport from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn);
  std::size_t total() const { return tp + fp + fn + tn; }
};

EvalReport evaluate(std::span<const Label> predicted, std::span<const Label> actual);

struct RunSpec {
  std::string classifier = "knn";  // knn | tree | logistic
  std::size_t k = 3;
  std::size_t max_depth = 12;
  LogisticOptions logistic;
  FeatureSpec features;
  double train_fraction = 0.8;
  std::size_t folds = 5;

  /// Reads the JSON run file layout; unknown classifier names throw ArgumentError.
  static RunSpec from_json_text(std::string_view text);
};

/// Fits the configured classifier on `train` and predicts `test`.
std::vector<Label> train_and_predict(const RunSpec& spec, std::span<const Row> train, std::span<const Row> test);

struct RunResult {
  std::vector<EvalReport> folds;
  EvalReport test;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
};

RunResult run(const Dataset& ds, const RunSpec& spec);

void write_eval_csv(std::ostream& out, const RunResult& result);
void write_eval_csv(std::ostream& out, const EvalReport& report);

}  // namespace chatlens::classify
