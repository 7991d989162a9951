#include "chatlens/classify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <tuple>

#include <json.hpp>

#include "chatlens/activity.hpp"
#include "chatlens/csv.hpp"
#include "chatlens/error.hpp"

namespace chatlens::classify {

std::string_view to_string(Label l) { return l == Label::Scam ? "scam" : "not_scam"; }

Label parse_label(std::string_view s) {
  if (s == "scam" || s == "1") return Label::Scam;
  if (s == "not_scam" || s == "0") return Label::NotScam;
  throw DataError("unknown class label '" + std::string(s) + "'");
}

Dataset Dataset::slice(std::size_t begin, std::size_t end) const {
  Dataset out;
  out.rows.assign(rows.begin() + static_cast<std::ptrdiff_t>(begin), rows.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

void Dataset::sort() {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& a, const Row& b) { return std::tie(a.sent, a.id) < std::tie(b.sent, b.id); });
}

Dataset build_dataset(const Corpus& corpus, const std::set<std::string>& scam_ids, std::size_t min_tokens) {
  std::map<std::string, std::pair<double, double>> concentration;
  for (const auto& [uid, g] : corpus.groups()) {
    auto d = activity::share_distribution(corpus, uid);
    if (d.total > 0) concentration[uid] = {activity::hh_concentration(d), activity::gini(d)};
  }
  Dataset ds;
  for (const auto& m : corpus.messages()) {
    if (m.kind != MessageKind::Text || !m.text) continue;
    auto tokens = text::tokenize(*m.text);
    if (tokens.size() < min_tokens) continue;
    Row r;
    r.id = m.id;
    r.sent = m.sent_time;
    r.tokens = std::move(tokens);
    r.word_count = static_cast<double>(text::word_count(*m.text));
    r.country = m.sender.country.tag;
    std::tie(r.group_hh, r.group_gini) = concentration[m.group_uid];
    r.label = scam_ids.count(m.id) ? Label::Scam : Label::NotScam;
    ds.rows.push_back(std::move(r));
  }
  ds.sort();
  return ds;
}

namespace {

// Moves a cut off a run of equal timestamps: forward first, backward if the
// forward move would reach `limit`. Returns `limit` when [lower, limit) is one run.
std::size_t untie_cut(const Dataset& ds, std::size_t cut, std::size_t lower, std::size_t limit) {
  if (cut <= lower || cut >= limit) return cut;
  std::size_t fwd = cut;
  while (fwd < limit && ds.rows[fwd].sent == ds.rows[fwd - 1].sent) ++fwd;
  if (fwd < limit) return fwd;
  std::size_t back = cut;
  while (back > lower && ds.rows[back].sent == ds.rows[back - 1].sent) --back;
  return back > lower ? back : limit;
}

}  // namespace

std::pair<Dataset, Dataset> chrono_split(const Dataset& ds, double train_fraction) {
  if (ds.size() < 2) throw ArgumentError("chronological split needs at least two rows");
  if (!(train_fraction > 0 && train_fraction < 1)) throw ArgumentError("train fraction must be in (0, 1)");
  auto cut = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(ds.size())));
  cut = std::clamp<std::size_t>(cut, 1, ds.size() - 1);
  cut = untie_cut(ds, cut, 0, ds.size());
  if (cut == ds.size()) throw DataError("chronological split needs at least two distinct timestamps");
  return {ds.slice(0, cut), ds.slice(cut, ds.size())};
}

FoldPlan forward_chain_folds(const Dataset& train, std::size_t k) {
  if (k < 2) throw ArgumentError("forward chaining needs k >= 2");
  const std::size_t n = train.size();
  if (n < k) throw ArgumentError("forward chaining needs at least k rows");
  const std::size_t block = n / k;
  std::vector<std::size_t> edges{0};
  for (std::size_t i = 1; i < k; ++i) {
    std::size_t cut = untie_cut(train, i * block, edges.back(), n);
    edges.push_back(std::max(cut, edges.back()));
  }
  edges.push_back(n);
  FoldPlan plan;
  for (std::size_t i = 1; i < k; ++i) {
    if (edges[i] == edges[i - 1] || edges[i + 1] == edges[i]) continue;
    plan.folds.push_back({edges[i], edges[i], edges[i + 1]});
  }
  return plan;
}

bool fold_is_chronological(const Dataset& ds, const Fold& fold) {
  if (fold.test_begin >= fold.test_end || fold.train_end == 0) return true;
  const Timestamp start = ds.rows[fold.test_begin].sent;
  for (std::size_t i = 0; i < fold.train_end; ++i) {
    if (ds.rows[i].sent >= start) return false;
  }
  return true;
}

Featurizer Featurizer::fit(std::span<const Row> train, const FeatureSpec& spec) {
  if (train.empty()) throw ArgumentError("cannot fit features on an empty training set");
  Featurizer f;
  f.spec_ = spec;
  std::vector<text::TokenList> docs;
  docs.reserve(train.size());
  for (const auto& r : train) docs.push_back(r.tokens);
  f.index_ = text::TfidfIndex::build(docs);
  auto [lo, hi] = std::minmax_element(train.begin(), train.end(),
                                      [](const Row& a, const Row& b) { return a.word_count < b.word_count; });
  f.wc_min_ = lo->word_count;
  f.wc_max_ = hi->word_count;
  return f;
}

std::size_t Featurizer::dimension() const {
  std::size_t d = index_.size();
  if (spec_.word_count) d += 1;
  if (spec_.country) d += 2;
  if (spec_.group_concentration) d += 2;
  return d;
}

text::SparseVector Featurizer::transform(const Row& row) const {
  text::SparseVector v = index_.vectorize(row.tokens);
  auto dim = static_cast<std::uint32_t>(index_.size());
  auto push = [&](double value) {
    if (value != 0) v.entries.emplace_back(dim, value);
    ++dim;
  };
  if (spec_.word_count) {
    const double span = wc_max_ - wc_min_;
    push(span > 0 ? std::clamp((row.word_count - wc_min_) / span, 0.0, 1.0) : 0.0);
  }
  if (spec_.country) {
    push(row.country == Country::CO ? 1.0 : 0.0);
    push(row.country == Country::VE ? 1.0 : 0.0);
  }
  if (spec_.group_concentration) {
    push(row.group_hh);
    push(row.group_gini);
  }
  return v;
}

Matrix featurize(const Featurizer& f, std::span<const Row> rows) {
  Matrix m;
  m.dims = f.dimension();
  m.x.reserve(rows.size());
  for (const auto& r : rows) {
    m.x.push_back(f.transform(r));
    m.y.push_back(r.label);
  }
  return m;
}

KnnClassifier::KnnClassifier(Matrix train, std::size_t k) : train_(std::move(train)), k_(k) {
  if (k_ == 0) throw ArgumentError("kNN needs k >= 1");
  if (k_ > train_.x.size()) throw ArgumentError("kNN k exceeds the training set size");
  postings_.resize(train_.dims);
  norms_.reserve(train_.x.size());
  for (std::size_t i = 0; i < train_.x.size(); ++i) {
    norms_.push_back(train_.x[i].norm());
    for (const auto& [d, w] : train_.x[i].entries) {
      if (d >= postings_.size()) postings_.resize(d + 1);
      postings_[d].emplace_back(i, w);
    }
  }
}

Label KnnClassifier::predict(const text::SparseVector& query) const {
  const std::size_t n = train_.x.size();
  std::vector<double> dots(n, 0.0);
  for (const auto& [d, w] : query.entries) {
    if (d >= postings_.size()) continue;
    for (const auto& [i, v] : postings_[d]) dots[i] += w * v;
  }
  const double qn = query.norm();
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    double c = (qn == 0 || norms_[i] == 0) ? 0.0 : std::clamp(dots[i] / (qn * norms_[i]), 0.0, 1.0);
    dist[i] = {1.0 - c, i};
  }
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_), dist.end());
  std::size_t scam = 0;
  for (std::size_t j = 0; j < k_; ++j) {
    if (train_.y[dist[j].second] == Label::Scam) ++scam;
  }
  return 2 * scam >= k_ ? Label::Scam : Label::NotScam;
}

double gini_impurity(std::size_t scam, std::size_t total) {
  if (total == 0) return 0.0;
  const double p = static_cast<double>(scam) / static_cast<double>(total);
  return 1.0 - p * p - (1.0 - p) * (1.0 - p);
}

std::optional<SplitChoice> best_split(const Matrix& data, std::span<const std::size_t> samples) {
  const std::size_t n = samples.size();
  std::size_t scam_total = 0;
  struct Entry {
    std::uint32_t dim;
    double value;
    bool scam;
  };
  std::vector<Entry> entries;
  for (std::size_t s : samples) {
    const bool is_scam = data.y[s] == Label::Scam;
    if (is_scam) ++scam_total;
    for (const auto& [d, v] : data.x[s].entries) entries.push_back({d, v, is_scam});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return std::tie(a.dim, a.value) < std::tie(b.dim, b.value);
  });

  std::optional<SplitChoice> best;
  const double nd = static_cast<double>(n);
  std::size_t i = 0;
  while (i < entries.size()) {
    std::size_t j = i;
    while (j < entries.size() && entries[j].dim == entries[i].dim) ++j;
    // distinct values of this feature with (count, scam count), zeros implicit
    std::vector<std::tuple<double, std::size_t, std::size_t>> values;
    std::size_t nz_count = j - i, nz_scam = 0;
    for (std::size_t e = i; e < j; ++e) {
      if (entries[e].scam) ++nz_scam;
      if (values.empty() || std::get<0>(values.back()) != entries[e].value) values.emplace_back(entries[e].value, 0, 0);
      ++std::get<1>(values.back());
      if (entries[e].scam) ++std::get<2>(values.back());
    }
    if (nz_count < n) {
      std::tuple<double, std::size_t, std::size_t> zero{0.0, n - nz_count, scam_total - nz_scam};
      auto pos = std::lower_bound(values.begin(), values.end(), 0.0,
                                  [](const auto& t, double v) { return std::get<0>(t) < v; });
      values.insert(pos, zero);
    }
    std::size_t left_n = 0, left_scam = 0;
    for (std::size_t v = 0; v + 1 < values.size(); ++v) {
      left_n += std::get<1>(values[v]);
      left_scam += std::get<2>(values[v]);
      const std::size_t right_n = n - left_n, right_scam = scam_total - left_scam;
      const double imp = (static_cast<double>(left_n) * gini_impurity(left_scam, left_n) +
                          static_cast<double>(right_n) * gini_impurity(right_scam, right_n)) /
                         nd;
      if (!best || imp < best->impurity - 1e-12) {
        best = SplitChoice{entries[i].dim, (std::get<0>(values[v]) + std::get<0>(values[v + 1])) / 2.0, imp};
      }
    }
    i = j;
  }
  return best;
}

DecisionTree DecisionTree::train(const Matrix& data, std::size_t max_depth) {
  if (data.x.empty()) throw ArgumentError("cannot train a tree on an empty set");
  if (max_depth < 1) throw ArgumentError("tree depth must be at least 1");
  DecisionTree tree;
  struct Work {
    std::size_t node;
    std::vector<std::size_t> samples;
    std::size_t depth;
  };
  std::vector<std::size_t> all(data.x.size());
  std::iota(all.begin(), all.end(), 0);
  tree.nodes_.push_back({});
  std::vector<Work> stack;
  stack.push_back({0, std::move(all), 0});
  while (!stack.empty()) {
    Work w = std::move(stack.back());
    stack.pop_back();
    std::size_t scam = 0;
    for (std::size_t s : w.samples) scam += data.y[s] == Label::Scam;
    Node node;
    node.samples = w.samples.size();
    node.impurity = gini_impurity(scam, w.samples.size());
    node.label = 2 * scam >= w.samples.size() ? Label::Scam : Label::NotScam;
    node.leaf = true;
    if (w.depth < max_depth && w.samples.size() >= 2 && node.impurity > 0) {
      auto split = best_split(data, w.samples);
      if (split && split->impurity < node.impurity - 1e-12) {
        std::vector<std::size_t> left, right;
        for (std::size_t s : w.samples) {
          (data.x[s].at(split->feature) <= split->threshold ? left : right).push_back(s);
        }
        node.leaf = false;
        node.feature = split->feature;
        node.threshold = split->threshold;
        node.left = tree.nodes_.size();
        node.right = tree.nodes_.size() + 1;
        tree.nodes_.emplace_back();
        tree.nodes_.emplace_back();
        stack.push_back({node.right, std::move(right), w.depth + 1});
        stack.push_back({node.left, std::move(left), w.depth + 1});
      }
    }
    tree.nodes_[w.node] = node;
  }
  return tree;
}

Label DecisionTree::predict(const text::SparseVector& x) const {
  std::size_t i = 0;
  while (!nodes_[i].leaf) i = x.at(nodes_[i].feature) <= nodes_[i].threshold ? nodes_[i].left : nodes_[i].right;
  return nodes_[i].label;
}

std::size_t DecisionTree::depth() const {
  std::vector<std::size_t> d(nodes_.size(), 0);
  std::size_t best = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    best = std::max(best, d[i]);
    if (!nodes_[i].leaf) {
      d[nodes_[i].left] = d[i] + 1;
      d[nodes_[i].right] = d[i] + 1;
    }
  }
  return best;
}

namespace {

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }
double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double linear(const text::SparseVector& x, std::span<const double> w, double b) {
  double z = b;
  for (const auto& [d, v] : x.entries) {
    if (d < w.size()) z += w[d] * v;
  }
  return z;
}

double loss_only(const Matrix& data, std::span<const double> w, double b, double C) {
  const double n = static_cast<double>(data.x.size());
  double loss = 0;
  for (std::size_t i = 0; i < data.x.size(); ++i) {
    const double z = linear(data.x[i], w, b);
    loss += softplus(z) - (data.y[i] == Label::Scam ? z : 0.0);
  }
  double sq = 0;
  for (double v : w) sq += v * v;
  return loss / n + sq / (2.0 * C * n);
}

}  // namespace

Objective logistic_objective(const Matrix& data, std::span<const double> w, double b, double C) {
  if (!(C > 0)) throw ArgumentError("logistic regression needs C > 0");
  if (data.x.empty()) throw ArgumentError("logistic objective over an empty set");
  const double n = static_cast<double>(data.x.size());
  Objective obj;
  obj.grad_w.assign(w.size(), 0.0);
  for (std::size_t i = 0; i < data.x.size(); ++i) {
    const double z = linear(data.x[i], w, b);
    const double y = data.y[i] == Label::Scam ? 1.0 : 0.0;
    obj.loss += softplus(z) - y * z;
    const double r = sigmoid(z) - y;
    obj.grad_b += r;
    for (const auto& [d, v] : data.x[i].entries) {
      if (d < w.size()) obj.grad_w[d] += r * v;
    }
  }
  double sq = 0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    sq += w[j] * w[j];
    obj.grad_w[j] = obj.grad_w[j] / n + w[j] / (C * n);
  }
  obj.loss = obj.loss / n + sq / (2.0 * C * n);
  obj.grad_b /= n;
  return obj;
}

LogisticModel LogisticModel::train(const Matrix& data, const LogisticOptions& options) {
  if (!(options.C > 0)) throw ArgumentError("logistic regression needs C > 0");
  if (data.x.empty()) throw ArgumentError("cannot train logistic regression on an empty set");
  LogisticModel model;
  model.w_.assign(data.dims, 0.0);
  double step = 1.0;
  Objective obj = logistic_objective(data, model.w_, model.b_, options.C);
  model.loss_history_.push_back(obj.loss);
  std::vector<double> trial(model.w_.size());
  for (model.iterations_ = 0; model.iterations_ < options.max_iter; ++model.iterations_) {
    double gsq = obj.grad_b * obj.grad_b;
    for (double g : obj.grad_w) gsq += g * g;
    if (std::sqrt(gsq) <= options.tol) {
      model.converged_ = true;
      break;
    }
    step = std::min(step * 2.0, 1e6);
    double trial_b = 0, trial_loss = 0;
    while (true) {
      for (std::size_t j = 0; j < trial.size(); ++j) trial[j] = model.w_[j] - step * obj.grad_w[j];
      trial_b = model.b_ - step * obj.grad_b;
      trial_loss = loss_only(data, trial, trial_b, options.C);
      if (trial_loss <= obj.loss - 0.5 * step * gsq || step < 1e-16) break;
      step /= 2.0;
    }
    if (!(trial_loss < obj.loss)) {
      model.converged_ = true;
      break;
    }
    model.w_.swap(trial);
    trial.resize(model.w_.size());
    model.b_ = trial_b;
    obj = logistic_objective(data, model.w_, model.b_, options.C);
    model.loss_history_.push_back(obj.loss);
  }
  return model;
}

double LogisticModel::probability(const text::SparseVector& x) const { return sigmoid(linear(x, w_, b_)); }

EvalReport EvalReport::from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
  EvalReport r{tp, fp, fn, tn, std::nullopt, std::nullopt};
  if (tp + fn > 0) r.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (tp + fp > 0) r.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  return r;
}

EvalReport evaluate(std::span<const Label> predicted, std::span<const Label> actual) {
  if (predicted.size() != actual.size()) throw ArgumentError("evaluate: prediction and label counts differ");
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const bool p = predicted[i] == Label::Scam, a = actual[i] == Label::Scam;
    if (p && a) ++tp;
    else if (p) ++fp;
    else if (a) ++fn;
    else ++tn;
  }
  return EvalReport::from_counts(tp, fp, fn, tn);
}

RunSpec RunSpec::from_json_text(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("run file is not valid JSON: ") + e.what());
  }
  RunSpec s;
  try {
    s.classifier = j.value("classifier", s.classifier);
    s.k = j.value("k", s.k);
    s.max_depth = j.value("max_depth", s.max_depth);
    s.logistic.C = j.value("C", s.logistic.C);
    s.logistic.max_iter = j.value("max_iter", s.logistic.max_iter);
    s.logistic.tol = j.value("tol", s.logistic.tol);
    s.train_fraction = j.value("train_fraction", s.train_fraction);
    s.folds = j.value("folds", s.folds);
    if (auto f = j.find("features"); f != j.end()) {
      s.features.word_count = f->value("word_count", false);
      s.features.country = f->value("country", false);
      s.features.group_concentration = f->value("group_concentration", false);
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("run file field has the wrong type: ") + e.what());
  }
  if (s.classifier != "knn" && s.classifier != "tree" && s.classifier != "logistic") {
    throw ArgumentError("unknown classifier '" + s.classifier + "'");
  }
  return s;
}

std::vector<Label> train_and_predict(const RunSpec& spec, std::span<const Row> train, std::span<const Row> test) {
  auto features = Featurizer::fit(train, spec.features);
  Matrix tm = featurize(features, train);
  std::vector<Label> out;
  out.reserve(test.size());
  if (spec.classifier == "knn") {
    KnnClassifier knn(std::move(tm), spec.k);
    for (const auto& r : test) out.push_back(knn.predict(features.transform(r)));
  } else if (spec.classifier == "tree") {
    auto tree = DecisionTree::train(tm, spec.max_depth);
    for (const auto& r : test) out.push_back(tree.predict(features.transform(r)));
  } else if (spec.classifier == "logistic") {
    auto model = LogisticModel::train(tm, spec.logistic);
    for (const auto& r : test) out.push_back(model.predict(features.transform(r)));
  } else {
    throw ArgumentError("unknown classifier '" + spec.classifier + "'");
  }
  return out;
}

namespace {

std::vector<Label> labels_of(std::span<const Row> rows) {
  std::vector<Label> out;
  for (const auto& r : rows) out.push_back(r.label);
  return out;
}

}  // namespace

RunResult run(const Dataset& ds, const RunSpec& spec) {
  auto [train, test] = chrono_split(ds, spec.train_fraction);
  RunResult result;
  result.train_size = train.size();
  result.test_size = test.size();
  auto plan = forward_chain_folds(train, spec.folds);
  for (const auto& fold : plan.folds) {
    if (!fold_is_chronological(train, fold)) throw Error("fold trains on rows at or after its test start");
    std::span<const Row> rows(train.rows);
    auto tr = rows.subspan(0, fold.train_end);
    auto te = rows.subspan(fold.test_begin, fold.test_end - fold.test_begin);
    result.folds.push_back(evaluate(train_and_predict(spec, tr, te), labels_of(te)));
  }
  result.test = evaluate(train_and_predict(spec, train.rows, test.rows), labels_of(test.rows));
  return result;
}

namespace {

void eval_row(csv::Writer& w, std::string_view stage, std::optional<std::size_t> fold, const EvalReport& r) {
  w << stage;
  if (fold) {
    w << *fold;
  } else {
    w << "";
  }
  w << r.tp << r.fp << r.fn << r.tn << r.recall << r.precision;
  w.end_row();
}

}  // namespace

void write_eval_csv(std::ostream& out, const RunResult& result) {
  csv::Writer w(out);
  w.header({"stage", "fold", "tp", "fp", "fn", "tn", "recall", "precision"});
  for (std::size_t i = 0; i < result.folds.size(); ++i) eval_row(w, "fold", i + 1, result.folds[i]);
  eval_row(w, "test", std::nullopt, result.test);
}

void write_eval_csv(std::ostream& out, const EvalReport& report) {
  csv::Writer w(out);
  w.header({"stage", "fold", "tp", "fp", "fn", "tn", "recall", "precision"});
  eval_row(w, "evaluate", std::nullopt, report);
}

}  // namespace chatlens::classify
