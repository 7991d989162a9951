#include <memory>
#include <set>

#include "chatlens/classify.hpp"
#include "chatlens/csv.hpp"
#include "chatlens/error.hpp"
#include "chatlens/misinfo.hpp"
#include "common.hpp"

namespace chatlens::cli {

using ordered_json = nlohmann::ordered_json;

namespace {

struct MisinfoFlags {
  std::string labeled;    // labeled corpus JSONL
  std::string labels;     // message_id,label CSV
  std::string decisions;  // message_id,decision CSV
  std::string label = "scam";
  std::optional<double> threshold;
};

std::string require(const std::string& value, const char* flag) {
  if (value.empty()) throw ArgumentError(std::string(flag) + " is required");
  return value;
}

void run_score(Context& ctx, const MisinfoFlags& f) {
  const Corpus corpus = ctx.load_corpus();
  const RunConfig& cfg = ctx.config();
  const auto labeled = misinfo::LabeledCorpus::load(require(f.labeled, "--labeled"));
  const double threshold = f.threshold.value_or(cfg.candidate_threshold);
  const auto exact = misinfo::exact_matches(corpus, labeled, cfg.min_tokens);
  const auto candidates = misinfo::score_candidates(corpus, labeled, threshold, cfg.min_tokens);
  {
    auto out = ctx.open_output("exact_labels.csv");
    misinfo::write_labels_csv(out, exact);
  }
  {
    auto out = ctx.open_output("candidates.csv");
    misinfo::write_candidates_csv(out, candidates);
  }
  ordered_json rec;
  rec["labeled_items"] = labeled.items().size();
  rec["meaningful_texts"] = misinfo::meaningful_texts(corpus, cfg.min_tokens).size();
  rec["exact_matches"] = exact.size();
  rec["candidates"] = candidates.size();
  rec["threshold"] = threshold;
  ctx.summary("misinfo score", {rec});
}

void run_review(Context& ctx, const MisinfoFlags& f) {
  const Corpus corpus = ctx.load_corpus();
  const RunConfig& cfg = ctx.config();
  const auto labeled = misinfo::LabeledCorpus::load(require(f.labeled, "--labeled"));
  const double threshold = f.threshold.value_or(cfg.candidate_threshold);
  auto labels = misinfo::exact_matches(corpus, labeled, cfg.min_tokens);
  auto candidates = misinfo::score_candidates(corpus, labeled, threshold, cfg.min_tokens);
  auto outcome = misinfo::apply_decisions(std::move(candidates),
                                          misinfo::read_decisions_csv(require(f.decisions, "--decisions")));
  const std::size_t exact = labels.size();
  labels.insert(outcome.labeled.begin(), outcome.labeled.end());
  {
    auto out = ctx.open_output("labels.csv");
    misinfo::write_labels_csv(out, labels);
  }
  {
    auto out = ctx.open_output("reviewed.csv");
    misinfo::write_candidates_csv(out, outcome.reviewed);
  }
  ordered_json rec;
  rec["exact_matches"] = exact;
  rec["reviewed"] = outcome.reviewed.size();
  rec["true_positives"] = outcome.labeled.size();
  rec["labeled_messages"] = labels.size();
  ctx.summary("misinfo review", {rec});
}

void run_merge(Context& ctx, const MisinfoFlags& f) {
  const Corpus corpus = ctx.load_corpus();
  const RunConfig& cfg = ctx.config();
  const auto labels = misinfo::read_labels_csv(require(f.labels, "--labels"));
  std::vector<std::string> ids;
  for (const auto& m : corpus.messages()) {
    if (labels.count(m.id)) ids.push_back(m.id);
  }
  if (ids.size() != labels.size()) {
    for (const auto& [id, l] : labels) {
      if (!corpus.find(id)) throw DataError(f.labels + ": message id '" + id + "' is not in the corpus");
    }
  }
  const double threshold = f.threshold.value_or(cfg.variant_threshold);
  const auto clusters = misinfo::merge_variants(corpus, ids, threshold, cfg.min_tokens);
  {
    auto out = ctx.open_output("clusters.csv");
    misinfo::write_clusters_csv(out, clusters);
  }
  ordered_json rec;
  rec["labeled_messages"] = ids.size();
  rec["clusters"] = clusters.size();
  rec["threshold"] = threshold;
  ctx.summary("misinfo merge", {rec});
}

void run_prevalence(Context& ctx, const MisinfoFlags& f) {
  const Corpus corpus = ctx.load_corpus();
  const RunConfig& cfg = ctx.config();
  const auto labels = misinfo::read_labels_csv(require(f.labels, "--labels"));
  const auto label = misinfo::parse_label(f.label);
  const auto report = misinfo::prevalence(corpus, labels, label, cfg.min_tokens);
  {
    auto out = ctx.open_output("group_prevalence.csv");
    misinfo::write_group_prevalence_csv(out, report.groups);
  }
  {
    auto out = ctx.open_output("user_prevalence.csv");
    misinfo::write_user_prevalence_csv(out, report.users);
  }
  std::size_t groups_with = 0;
  for (const auto& g : report.groups) groups_with += g.labeled > 0;
  ordered_json rec;
  rec["label"] = f.label;
  rec["groups"] = report.groups.size();
  rec["groups_with_label"] = groups_with;
  ctx.summary("misinfo prevalence", {rec});
}

struct ClassifyFlags {
  std::string labels;
  std::string run_file;
  std::string predictions;
};

classify::RunSpec load_spec(Context& ctx, const ClassifyFlags& f) {
  if (!f.run_file.empty()) return classify::RunSpec::from_json_text(read_text_file(f.run_file));
  if (const auto& c = ctx.config().classifier) return classify::RunSpec::from_json_text(c->dump());
  return {};
}

void run_classify(Context& ctx, const ClassifyFlags& f) {
  const Corpus corpus = ctx.load_corpus();
  const RunConfig& cfg = ctx.config();
  const auto spec = load_spec(ctx, f);
  std::set<std::string> scam_ids;
  for (const auto& [id, l] : misinfo::read_labels_csv(require(f.labels, "--labels"))) {
    if (l == misinfo::Label::Scam) scam_ids.insert(id);
  }
  const auto ds = classify::build_dataset(corpus, scam_ids, cfg.min_tokens);
  const auto result = classify::run(ds, spec);
  {
    auto out = ctx.open_output("eval.csv");
    classify::write_eval_csv(out, result);
  }
  ordered_json rec;
  rec["classifier"] = spec.classifier;
  rec["rows"] = ds.size();
  rec["train"] = result.train_size;
  rec["test"] = result.test_size;
  rec["test_recall"] = result.test.recall ? ordered_json(*result.test.recall) : ordered_json(nullptr);
  rec["test_precision"] = result.test.precision ? ordered_json(*result.test.precision) : ordered_json(nullptr);
  ctx.summary("classify", {rec});
}

void run_evaluate(Context& ctx, const ClassifyFlags& f) {
  const std::string path = require(f.predictions, "--predictions");
  const auto table = csv::read_file(path);
  const std::size_t pc = table.column("predicted");
  const std::size_t ac = table.column("actual");
  std::vector<classify::Label> predicted, actual;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() <= std::max(pc, ac)) throw DataError(path + " row " + std::to_string(r + 2) + ": missing column");
    try {
      predicted.push_back(classify::parse_label(row[pc]));
      actual.push_back(classify::parse_label(row[ac]));
    } catch (const Error& e) {
      throw DataError(path + " row " + std::to_string(r + 2) + ": " + e.what());
    }
  }
  const auto report = classify::evaluate(predicted, actual);
  {
    auto out = ctx.open_output("eval.csv");
    classify::write_eval_csv(out, report);
  }
  ordered_json rec;
  rec["rows"] = report.total();
  rec["recall"] = report.recall ? ordered_json(*report.recall) : ordered_json(nullptr);
  rec["precision"] = report.precision ? ordered_json(*report.precision) : ordered_json(nullptr);
  ctx.summary("classify evaluate", {rec});
}

}  // namespace

void register_text(CLI::App& app, Context& ctx, Action& action) {
  auto* mis = app.add_subcommand("misinfo", "Misinformation candidate scoring, variants, prevalence");
  mis->require_subcommand(1);
  auto mf = std::make_shared<MisinfoFlags>();

  auto* score = mis->add_subcommand("score", "Exact matches and review candidates");
  score->add_option("--labeled", mf->labeled, "Labeled corpus JSONL")->required();
  score->add_option("--threshold", mf->threshold, "Candidate cosine threshold (default 0.3)");
  score->callback([&ctx, &action, mf] { action = [&ctx, mf] { run_score(ctx, *mf); }; });

  auto* review = mis->add_subcommand("review", "Apply review decisions to candidates");
  review->add_option("--labeled", mf->labeled, "Labeled corpus JSONL")->required();
  review->add_option("--decisions", mf->decisions, "CSV message_id,decision")->required();
  review->add_option("--threshold", mf->threshold, "Candidate cosine threshold (default 0.3)");
  review->callback([&ctx, &action, mf] { action = [&ctx, mf] { run_review(ctx, *mf); }; });

  auto* merge = mis->add_subcommand("merge", "Cluster labeled messages into variants");
  merge->add_option("--labels", mf->labels, "CSV message_id,label")->required();
  merge->add_option("--threshold", mf->threshold, "Variant cosine threshold (default 0.8)");
  merge->callback([&ctx, &action, mf] { action = [&ctx, mf] { run_merge(ctx, *mf); }; });

  auto* prev = mis->add_subcommand("prevalence", "Message and user prevalence per group");
  prev->add_option("--labels", mf->labels, "CSV message_id,label")->required();
  prev->add_option("--label", mf->label, "scam or fake_news")->capture_default_str();
  prev->callback([&ctx, &action, mf] { action = [&ctx, mf] { run_prevalence(ctx, *mf); }; });

  auto* cls = app.add_subcommand("classify", "Chronological split, forward-chain folds, evaluation");
  auto cf = std::make_shared<ClassifyFlags>();
  cls->add_option("--labels", cf->labels, "CSV message_id,label; scam rows are positives");
  cls->add_option("--run", cf->run_file, "Run spec JSON");
  cls->callback([&ctx, &action, cf] {
    if (!action) action = [&ctx, cf] { run_classify(ctx, *cf); };
  });
  auto* eval = cls->add_subcommand("evaluate", "Confusion matrix from a predictions CSV");
  eval->add_option("--predictions", cf->predictions, "CSV with predicted,actual")->required();
  eval->callback([&ctx, &action, cf] { action = [&ctx, cf] { run_evaluate(ctx, *cf); }; });
}

}  // namespace chatlens::cli
