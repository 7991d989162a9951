#include <algorithm>
#include <filesystem>
#include <memory>

#include "chatlens/error.hpp"
#include "chatlens/ingest.hpp"
#include "chatlens/synth.hpp"
#include "common.hpp"

namespace chatlens::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

// Directories expand to their *.jsonl files in name order.
std::vector<std::string> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<std::string> paths;
  for (const auto& in : inputs) {
    std::error_code ec;
    if (fs::is_directory(in, ec)) {
      std::vector<std::string> found;
      for (const auto& e : fs::directory_iterator(in)) {
        if (e.is_regular_file() && e.path().extension() == ".jsonl") found.push_back(e.path().string());
      }
      std::sort(found.begin(), found.end());
      paths.insert(paths.end(), found.begin(), found.end());
    } else {
      paths.push_back(in);
    }
  }
  return paths;
}

void run_ingest(Context& ctx, bool no_merge) {
  if (ctx.opts.inputs.empty()) throw ArgumentError("--input is required");
  const auto paths = expand_inputs(ctx.opts.inputs);
  const RunConfig& cfg = ctx.config();
  const TzOffset tz = ctx.tz();

  auto read = ingest::read_logs(paths);
  auto deduped = ingest::dedup(read.records);
  Corpus corpus = std::move(deduped.corpus);
  ingest::MergeReport merges;
  if (!no_merge) {
    ingest::MergeOptions mo;
    mo.min_cosine = cfg.merge_min_cosine;
    mo.min_identical_fraction = cfg.merge_min_identical;
    auto [merged, report] = ingest::resolve_group_variants(corpus, mo);
    corpus = std::move(merged);
    merges = std::move(report);
  }
  {
    auto messages = ctx.open_output("corpus.jsonl");
    auto groups = ctx.open_output("groups.jsonl");
    ingest::write_corpus(corpus, messages, groups, tz);
  }
  {
    auto out = ctx.open_output("dedup_report.csv");
    ingest::write_dedup_report_csv(out, deduped.report);
  }
  {
    auto out = ctx.open_output("merge_report.csv");
    ingest::write_merge_report_csv(out, merges);
  }
  ordered_json rec;
  rec["files"] = paths.size();
  rec["records_read"] = read.records.size();
  rec["rejected_lines"] = read.rejects.size();
  rec["duplicates_removed"] = deduped.report.removed;
  rec["true_duplicates_kept"] = deduped.report.true_duplicates_kept;
  rec["groups_merged"] = merges.merges.size();
  rec["messages"] = corpus.messages().size();
  rec["groups"] = corpus.groups().size();
  rec["users"] = corpus.users().size();
  ctx.summary("ingest", {rec});

  if (!read.rejects.empty()) {
    auto out = ctx.open_output("rejects.csv");
    ingest::write_rejects_csv(out, read.rejects);
    const auto& first = read.rejects.front();
    throw DataError(std::to_string(read.rejects.size()) + " malformed line(s), first at " + first.file + ":" +
                    std::to_string(first.line_no) + " (" + first.reason + "); rejects report: " +
                    (fs::path(ctx.opts.out) / "rejects.csv").string());
  }
}

void run_synth(Context& ctx) {
  const std::string out = ctx.require_out();
  synth::GenConfig cfg;
  if (!ctx.opts.config.empty()) cfg = synth::GenConfig::from_json_text(read_text_file(ctx.opts.config));
  if (ctx.opts.seed) cfg.seed = *ctx.opts.seed;
  if (!ctx.opts.tz.empty()) cfg.tz_offset_minutes = parse_tz(ctx.opts.tz).minutes;
  auto generated = synth::generate(cfg);
  synth::write_generated(generated, cfg, out);
  ordered_json rec;
  rec["seed"] = cfg.seed;
  rec["messages"] = generated.truth.messages.size();
  rec["emitted_records"] = generated.truth.emitted_records;
  rec["renames"] = generated.truth.renames.size();
  rec["planted"] = generated.truth.planted.size();
  ctx.summary("synth", {rec});
}

}  // namespace

void register_ingest(CLI::App& app, Context& ctx, Action& action) {
  auto* ingest = app.add_subcommand("ingest", "Read logs, deduplicate, merge renamed groups");
  auto no_merge = std::make_shared<bool>(false);
  ingest->add_flag("--no-merge", *no_merge, "Skip group variant resolution");
  ingest->callback([&ctx, &action, no_merge] { action = [&ctx, no_merge] { run_ingest(ctx, *no_merge); }; });

  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus with ground truth");
  synth->callback([&ctx, &action] { action = [&ctx] { run_synth(ctx); }; });
}

}  // namespace chatlens::cli
