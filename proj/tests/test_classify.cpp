#include <doctest.h>

#include <cmath>
#include <random>

#include "chatlens/classify.hpp"
#include "chatlens/error.hpp"

using namespace chatlens;
using classify::Label;
using doctest::Approx;

namespace {

classify::Row row(std::string id, std::int64_t sent, text::TokenList tokens, Label label) {
  classify::Row r;
  r.id = std::move(id);
  r.sent = Timestamp{sent};
  r.tokens = std::move(tokens);
  r.word_count = static_cast<double>(r.tokens.size());
  r.label = label;
  return r;
}

classify::Dataset timed(const std::vector<std::int64_t>& times) {
  classify::Dataset ds;
  for (std::size_t i = 0; i < times.size(); ++i) {
    char id[8];
    std::snprintf(id, sizeof id, "r%02zu", i);
    ds.rows.push_back(row(id, times[i], {"w"}, Label::NotScam));
  }
  ds.sort();
  return ds;
}

text::SparseVector sparse(std::vector<std::pair<std::uint32_t, double>> entries) { return {std::move(entries)}; }

}  // namespace

TEST_CASE("evaluation reproduces published confusion figures") {
  const auto knn = classify::EvalReport::from_counts(103, 11, 49, 8637);
  CHECK(std::abs(*knn.recall * 100 - 67.8) < 0.05);
  CHECK(std::abs(*knn.precision * 100 - 90.4) < 0.05);
  const auto tree = classify::EvalReport::from_counts(58, 7, 94, 8641);
  CHECK(std::abs(*tree.recall * 100 - 38.2) < 0.05);
  CHECK(std::abs(*tree.precision * 100 - 89.2) < 0.05);
  CHECK(tree.total() == 8800);

  const auto none = classify::EvalReport::from_counts(0, 0, 0, 5);
  CHECK(!none.recall);
  CHECK(!none.precision);
}

TEST_CASE("evaluate counts the confusion cells") {
  const std::vector<Label> predicted{Label::Scam, Label::Scam, Label::NotScam, Label::NotScam, Label::Scam};
  const std::vector<Label> actual{Label::Scam, Label::NotScam, Label::Scam, Label::NotScam, Label::Scam};
  const auto r = classify::evaluate(predicted, actual);
  CHECK(r.tp == 2);
  CHECK(r.fp == 1);
  CHECK(r.fn == 1);
  CHECK(r.tn == 1);
  CHECK(*r.recall == Approx(2.0 / 3));
  CHECK_THROWS_AS(classify::evaluate(predicted, std::vector<Label>{Label::Scam}), ArgumentError);
}

TEST_CASE("chronological split moves off timestamp ties") {
  const auto ds = timed({1, 2, 3, 3, 3});
  const auto [train, test] = classify::chrono_split(ds, 0.8);
  CHECK(train.size() == 2);
  CHECK(test.size() == 3);
  const auto plain = classify::chrono_split(timed({1, 2, 3, 4, 5}), 0.8);
  CHECK(plain.first.size() == 4);
  CHECK_THROWS_AS(classify::chrono_split(timed({1}), 0.8), ArgumentError);
  CHECK_THROWS_AS(classify::chrono_split(ds, 1.0), ArgumentError);
  CHECK_THROWS_AS(classify::chrono_split(timed({4, 4, 4}), 0.8), DataError);
}

TEST_CASE("forward chaining folds") {
  const auto ds = timed({1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  const auto plan = classify::forward_chain_folds(ds, 5);
  REQUIRE(plan.folds.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(plan.folds[i].train_end == 2 * (i + 1));
    CHECK(plan.folds[i].test_begin == 2 * (i + 1));
    CHECK(plan.folds[i].test_end == 2 * (i + 2));
  }
  CHECK_THROWS_AS(classify::forward_chain_folds(ds, 1), ArgumentError);
  CHECK_THROWS_AS(classify::forward_chain_folds(timed({1, 2}), 5), ArgumentError);

  const auto tied_tail = classify::forward_chain_folds(timed({1, 2, 3, 3, 3, 3, 3, 3}), 4);
  REQUIRE(tied_tail.folds.size() == 1);
  CHECK(tied_tail.folds[0].train_end == 2);
  CHECK(tied_tail.folds[0].test_end == 8);
}

TEST_CASE("folds stay chronological under random ties") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 10 + rng() % 60;
    std::vector<std::int64_t> times;
    for (std::size_t i = 0; i < n; ++i) times.push_back(static_cast<std::int64_t>(rng() % (n / 2 + 1)));
    const auto ds = timed(times);
    for (std::size_t k : {2, 3, 5}) {
      for (const auto& fold : classify::forward_chain_folds(ds, k).folds) {
        CHECK(classify::fold_is_chronological(ds, fold));
        CHECK(fold.test_begin < fold.test_end);
      }
    }
    if (ds.rows.front().sent != ds.rows.back().sent) {
      const auto [train, test] = classify::chrono_split(ds, 0.8);
      CHECK(train.rows.back().sent < test.rows.front().sent);
    }
  }
}

TEST_CASE("nearest neighbour votes") {
  classify::Matrix m;
  m.x = {sparse({{0, 1.0}}), sparse({{1, 1.0}}), sparse({{0, 1.0}, {1, 1.0}})};
  m.y = {Label::Scam, Label::NotScam, Label::NotScam};
  m.dims = 2;
  classify::KnnClassifier one(m, 1);
  CHECK(one.predict(sparse({{0, 2.0}})) == Label::Scam);
  CHECK(one.predict(sparse({{1, 0.5}})) == Label::NotScam);
  classify::KnnClassifier two(m, 2);
  CHECK(two.predict(sparse({{0, 1.0}, {1, 0.1}})) == Label::Scam);
}

TEST_CASE("gini impurity and best split") {
  CHECK(classify::gini_impurity(0, 0) == 0.0);
  CHECK(classify::gini_impurity(5, 10) == Approx(0.5));
  CHECK(classify::gini_impurity(10, 10) == 0.0);
  CHECK(classify::gini_impurity(1, 4) == Approx(0.375));

  classify::Matrix m;
  m.x = {sparse({{0, 1.0}}), sparse({{0, 2.0}}), sparse({{0, 3.0}}), sparse({{0, 4.0}})};
  m.y = {Label::NotScam, Label::NotScam, Label::Scam, Label::Scam};
  m.dims = 1;
  const std::vector<std::size_t> all{0, 1, 2, 3};
  const auto split = classify::best_split(m, all);
  REQUIRE(split);
  CHECK(split->feature == 0);
  CHECK(split->threshold == 2.5);
  CHECK(split->impurity == 0.0);

  classify::Matrix flat = m;
  for (auto& x : flat.x) x = sparse({{0, 1.0}});
  CHECK(!classify::best_split(flat, all));
}

TEST_CASE("tree fits separable data") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  classify::Matrix m;
  m.dims = 3;
  for (int i = 0; i < 80; ++i) {
    const double a = u(rng), b = u(rng);
    m.x.push_back(sparse({{0, a}, {2, b}}));
    m.y.push_back(a > 0.5 && b < 0.7 ? Label::Scam : Label::NotScam);
  }
  const auto tree = classify::DecisionTree::train(m, 6);
  for (std::size_t i = 0; i < m.x.size(); ++i) CHECK(tree.predict(m.x[i]) == m.y[i]);
  CHECK(tree.depth() <= 6);
  const auto stump = classify::DecisionTree::train(m, 1);
  CHECK(stump.depth() <= 1);
}

TEST_CASE("logistic gradient matches finite differences") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int instance = 0; instance < 10; ++instance) {
    classify::Matrix m;
    m.dims = 6;
    for (int i = 0; i < 25; ++i) {
      text::SparseVector x;
      for (std::uint32_t d = 0; d < m.dims; ++d) {
        if (rng() % 2) x.entries.push_back({d, normal(rng)});
      }
      m.x.push_back(x);
      m.y.push_back(rng() % 3 == 0 ? Label::Scam : Label::NotScam);
    }
    std::vector<double> w(m.dims);
    for (auto& v : w) v = normal(rng);
    const double b = normal(rng), C = 0.5 + instance;
    const auto obj = classify::logistic_objective(m, w, b, C);
    const double h = 1e-6;
    for (std::size_t d = 0; d < m.dims; ++d) {
      auto up = w, down = w;
      up[d] += h;
      down[d] -= h;
      const double fd = (classify::logistic_objective(m, up, b, C).loss -
                         classify::logistic_objective(m, down, b, C).loss) / (2 * h);
      CHECK(std::abs(fd - obj.grad_w[d]) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }
    const double fdb = (classify::logistic_objective(m, w, b + h, C).loss -
                        classify::logistic_objective(m, w, b - h, C).loss) / (2 * h);
    CHECK(std::abs(fdb - obj.grad_b) <= 1e-6 * std::max(1.0, std::abs(fdb)));
  }
}

TEST_CASE("logistic training lowers the loss") {
  classify::Matrix m;
  m.dims = 2;
  for (int i = 0; i < 40; ++i) {
    const bool scam = i % 2 == 0;
    m.x.push_back(sparse({{scam ? 0u : 1u, 1.0 + 0.01 * i}}));
    m.y.push_back(scam ? Label::Scam : Label::NotScam);
  }
  const auto model = classify::LogisticModel::train(m, {});
  REQUIRE(model.loss_history().size() >= 2);
  CHECK(model.loss_history().back() < model.loss_history().front());
  for (std::size_t i = 0; i < m.x.size(); ++i) CHECK(model.predict(m.x[i]) == m.y[i]);
}

TEST_CASE("run spec parsing") {
  const auto s = classify::RunSpec::from_json_text(
      R"({"classifier":"tree","max_depth":4,"features":{"word_count":true},"folds":3})");
  CHECK(s.classifier == "tree");
  CHECK(s.max_depth == 4);
  CHECK(s.features.word_count);
  CHECK(!s.features.country);
  CHECK(s.folds == 3);
  CHECK_THROWS_AS(classify::RunSpec::from_json_text(R"({"classifier":"svm"})"), ArgumentError);
  CHECK_THROWS_AS(classify::RunSpec::from_json_text("{"), DataError);
}

TEST_CASE("end-to-end run on a toy dataset") {
  classify::Dataset ds;
  for (int i = 0; i < 60; ++i) {
    const bool scam = i % 4 == 0;
    text::TokenList t = scam ? text::TokenList{"gan", "diner", "rap", "ofert", "trabaj"}
                             : text::TokenList{"vam", "mercad", "compr", "frut", "w" + std::to_string(i % 7)};
    ds.rows.push_back(row("r" + std::to_string(100 + i), 1000 + i * 60, t, scam ? Label::Scam : Label::NotScam));
  }
  ds.sort();
  classify::RunSpec spec;
  spec.k = 1;
  const auto result = classify::run(ds, spec);
  CHECK(result.train_size == 48);
  CHECK(result.test_size == 12);
  CHECK(result.folds.size() == 4);
  CHECK(*result.test.recall == 1.0);
  CHECK(*result.test.precision == 1.0);
}
