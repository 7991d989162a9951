#include <memory>

#include "chatlens/activity.hpp"
#include "chatlens/cascades.hpp"
#include "chatlens/csv.hpp"
#include "chatlens/error.hpp"
#include "chatlens/graph.hpp"
#include "chatlens/membership.hpp"
#include "chatlens/text.hpp"
#include "chatlens/trends.hpp"
#include "common.hpp"

namespace chatlens::cli {

using ordered_json = nlohmann::ordered_json;

namespace {

void write_summary_row(csv::Writer& w, const std::string& population, const activity::Summary& s) {
  w << population << s.count << s.mean << s.p25 << s.median << s.p75 << s.p90 << s.min << s.max;
  w.end_row();
}

void run_metrics(Context& ctx) {
  const Corpus corpus = ctx.load_corpus();
  const TzOffset tz = ctx.tz();
  {
    auto out = ctx.open_output("membership.csv");
    membership::write_membership_csv(out, membership::membership_table(corpus));
  }
  {
    auto out = ctx.open_output("co_membership.csv");
    csv::Writer w(out);
    w.header({"user", "country", "degree", "to_co", "to_ve"});
    for (const auto& [user, d] : membership::co_membership_degrees(corpus)) {
      w << user << corpus.users().at(user).country.to_string() << d.total << d.to_co << d.to_ve;
      w.end_row();
    }
  }
  {
    auto out = ctx.open_output("activity.csv");
    activity::write_activity_csv(out, activity::activity_table(corpus, tz));
  }
  std::size_t one_word = 0;
  {
    auto out = ctx.open_output("length_stats.csv");
    csv::Writer w(out);
    w.header({"population", "count", "mean", "p25", "median", "p75", "p90", "min", "max"});
    const auto all_text = activity::length_stats(corpus, {MessageKind::Text, std::nullopt, std::nullopt});
    one_word = all_text.one_word_messages;
    write_summary_row(w, "text_words", all_text.words);
    write_summary_row(w, "text_chars", all_text.characters);
    const auto fwd = activity::length_stats(corpus, {MessageKind::Text, true, std::nullopt});
    write_summary_row(w, "text_words_forwarded", fwd.words);
    const auto orig = activity::length_stats(corpus, {MessageKind::Text, false, std::nullopt});
    write_summary_row(w, "text_words_original", orig.words);
    write_summary_row(w, "audio_seconds",
                      activity::length_stats(corpus, {MessageKind::Audio, std::nullopt, std::nullopt}).media_seconds);
    write_summary_row(w, "video_seconds",
                      activity::length_stats(corpus, {MessageKind::Video, std::nullopt, std::nullopt}).media_seconds);
  }
  const auto images = activity::reshare_analysis(corpus, MessageKind::Image, tz);
  const auto videos = activity::reshare_analysis(corpus, MessageKind::Video, tz);
  {
    auto out = ctx.open_output("reshare_image.csv");
    activity::write_reshare_csv(out, images);
  }
  {
    auto out = ctx.open_output("reshare_video.csv");
    activity::write_reshare_csv(out, videos);
  }
  ordered_json rec;
  rec["groups"] = corpus.groups().size();
  rec["users"] = corpus.users().size();
  rec["messages"] = corpus.messages().size();
  rec["one_word_messages"] = one_word;
  rec["distinct_images"] = images.size();
  rec["distinct_videos"] = videos.size();
  ctx.summary("metrics", {rec});
}

ordered_json graph_record(const char* name, const graph::SimpleGraph& g) {
  ordered_json rec;
  rec["graph"] = name;
  rec["nodes"] = g.node_count();
  rec["edges"] = g.edge_count();
  const auto comps = graph::connected_components(g);
  rec["components"] = comps.size();
  rec["largest_component"] = comps.empty() ? 0 : comps.front().size();
  rec["diameter"] = graph::diameter(g);
  return rec;
}

void run_graph(Context& ctx, bool skip_user_metrics) {
  const Corpus corpus = ctx.load_corpus();
  const auto groups = graph::build_group_graph(corpus);
  const auto users = graph::build_user_graph(corpus);
  {
    auto out = ctx.open_output("group_edges.csv");
    graph::write_edge_list_csv(out, groups);
  }
  {
    auto out = ctx.open_output("group_nodes.csv");
    graph::write_node_metrics_csv(out, graph::node_metrics(groups));
  }
  {
    auto out = ctx.open_output("user_edges.csv");
    graph::write_edge_list_csv(out, users);
  }
  if (!skip_user_metrics) {
    auto out = ctx.open_output("user_nodes.csv");
    graph::write_node_metrics_csv(out, graph::node_metrics(users));
  }
  ctx.summary("graph", {graph_record("group", groups), graph_record("user", users)});
}

void run_cascades(Context& ctx, std::int64_t window) {
  const Corpus corpus = ctx.load_corpus();
  const auto forest = cascades::resolve_replies(corpus);
  std::vector<cascades::CascadeStats> stats;
  std::size_t largest = 0;
  for (const auto& g : forest.cascades) {
    stats.push_back(cascades::cascade_stats(g));
    largest = std::max(largest, g.size());
  }
  {
    auto out = ctx.open_output("cascades.csv");
    cascades::write_cascades_csv(out, stats);
  }
  {
    auto out = ctx.open_output("message_virality.csv");
    cascades::write_message_virality_csv(out, cascades::message_viralities(forest));
  }
  {
    auto out = ctx.open_output("group_virality.csv");
    csv::Writer w(out);
    w.header({"group_uid", "virality"});
    for (const auto& [uid, v] : cascades::group_viralities(corpus, forest)) {
      w << uid << v;
      w.end_row();
    }
  }
  {
    auto out = ctx.open_output("competing.csv");
    csv::Writer w(out);
    w.header({"id", "group_uid", "competing"});
    const auto counts = cascades::competing_counts(corpus, window);
    for (std::size_t i = 0; i < counts.size(); ++i) {
      w << corpus.messages()[i].id << corpus.messages()[i].group_uid << counts[i];
      w.end_row();
    }
  }
  ordered_json rec;
  rec["cascades"] = forest.cascades.size();
  rec["resolved_replies"] = forest.resolved;
  rec["unresolved_replies"] = forest.unresolved;
  rec["largest_cascade"] = largest;
  ctx.summary("cascades", {rec});
}

struct TrendFlags {
  std::vector<std::string> keywords;
  std::vector<std::string> periods;
  std::vector<std::string> metrics;
  std::size_t bucket = 60;
};

std::vector<std::string> keyword_stems(const std::vector<std::string>& words) {
  std::vector<std::string> stems;
  for (const auto& w : words) {
    auto tokens = text::tokenize(w);
    if (tokens.empty()) throw ArgumentError("keyword '" + w + "' has no content after stopword removal");
    stems.insert(stems.end(), tokens.begin(), tokens.end());
  }
  return stems;
}

void run_trends(Context& ctx, const TrendFlags& flags) {
  const Corpus corpus = ctx.load_corpus();
  const TzOffset tz = ctx.tz();
  const RunConfig& cfg = ctx.config();
  std::vector<ordered_json> records;

  const auto& words = flags.keywords.empty() ? cfg.keywords : flags.keywords;
  const std::vector<std::string> stems = keyword_stems(words.empty() ? std::vector<std::string>{"trochas"} : words);
  for (auto gran : {trends::Granularity::Message, trends::Granularity::Group, trends::Granularity::User}) {
    const char* name = gran == trends::Granularity::Message ? "message"
                       : gran == trends::Granularity::Group ? "group"
                                                            : "user";
    auto series = trends::keyword_daily_share(corpus, stems, gran, cfg.min_tokens, tz);
    auto out = ctx.open_output(std::string("keyword_share_") + name + ".csv");
    trends::write_series_csv(out, series);
  }

  struct ProfileCase {
    const char* name;
    std::optional<Country> country;
    std::optional<trends::DayClass> day;
  };
  const ProfileCase cases[] = {
      {"all", std::nullopt, std::nullopt},
      {"co_weekday", Country::CO, trends::DayClass::Weekday},
      {"co_weekend", Country::CO, trends::DayClass::Weekend},
      {"ve_weekday", Country::VE, trends::DayClass::Weekday},
      {"ve_weekend", Country::VE, trends::DayClass::Weekend},
  };
  for (const auto& c : cases) {
    auto profile = trends::hourly_profile(corpus, c.country, c.day, flags.bucket, tz);
    auto out = ctx.open_output(std::string("profile_") + c.name + ".csv");
    trends::write_profile_csv(out, profile);
    ordered_json rec;
    rec["profile"] = c.name;
    rec["messages"] = profile.count;
    rec["nocturnal_share"] = profile.nocturnal_share;
    records.push_back(rec);
  }

  std::vector<trends::Period> periods;
  for (const auto& p : flags.periods) periods.push_back(parse_period(p));
  if (periods.empty()) {
    for (const auto& [name, p] : cfg.periods) periods.push_back(p);
  }
  if (!periods.empty()) {
    if (periods.size() != 2) throw ArgumentError("period comparison takes exactly two periods");
    std::vector<trends::Metric> metrics;
    if (flags.metrics.empty()) {
      metrics = {trends::Metric::TextWords,         trends::Metric::TextChars,
                 trends::Metric::AudioSeconds,      trends::Metric::VideoSeconds,
                 trends::Metric::MessagesPerUserDay, trends::Metric::RepliesPerMessage,
                 trends::Metric::CascadeVirality,   trends::Metric::KeywordShare};
    } else {
      for (const auto& m : flags.metrics) metrics.push_back(trends::parse_metric(m));
    }
    trends::CompareOptions opts;
    opts.stems = stems;
    opts.min_words = cfg.min_tokens;
    opts.tz = tz;
    std::vector<std::pair<std::string, trends::PeriodComparison>> rows;
    ordered_json skipped = ordered_json::array();
    for (auto m : metrics) {
      try {
        rows.emplace_back(std::string(trends::to_string(m)), trends::period_compare(corpus, periods[0], periods[1], m, opts));
      } catch (const UndefinedError&) {
        skipped.push_back(std::string(trends::to_string(m)));
      }
    }
    auto out = ctx.open_output("period_compare.csv");
    trends::write_comparison_csv(out, rows);
    ordered_json rec;
    rec["period_a"] = format_date(periods[0].from) + ":" + format_date(periods[0].to);
    rec["period_b"] = format_date(periods[1].from) + ":" + format_date(periods[1].to);
    rec["compared"] = rows.size();
    rec["skipped_metrics"] = skipped;
    records.push_back(rec);
  }

  for (auto m : {trends::Metric::TextWords, trends::Metric::TextChars, trends::Metric::AudioSeconds,
                 trends::Metric::VideoSeconds}) {
    const std::string name(trends::to_string(m));
    try {
      auto fit = trends::falsification_trend(corpus, m, tz);
      auto out = ctx.open_output("falsification_" + name + ".csv");
      stats::write_ols_csv(out, fit);
    } catch (const UndefinedError& e) {
      ordered_json rec;
      rec["falsification"] = name;
      rec["skipped"] = e.what();
      records.push_back(rec);
    }
  }

  {
    auto out = ctx.open_output("user_day.csv");
    csv::Writer w(out);
    w.header({"user", "date", "messages"});
    for (const auto& d : trends::user_day_activity(corpus, tz)) {
      w << d.user << format_date(d.date) << d.messages;
      w.end_row();
    }
  }
  ctx.summary("trends", records);
}

}  // namespace

void register_analysis(CLI::App& app, Context& ctx, Action& action) {
  auto* metrics = app.add_subcommand("metrics", "Membership and activity exports");
  metrics->callback([&ctx, &action] { action = [&ctx] { run_metrics(ctx); }; });

  auto* graph = app.add_subcommand("graph", "Group and user graphs with node metrics");
  auto skip = std::make_shared<bool>(false);
  graph->add_flag("--skip-user-metrics", *skip, "Only write the user edge list");
  graph->callback([&ctx, &action, skip] { action = [&ctx, skip] { run_graph(ctx, *skip); }; });

  auto* casc = app.add_subcommand("cascades", "Reply cascades and virality");
  auto window = std::make_shared<std::int64_t>(5);
  casc->add_option("--window", *window, "Competing-message window in minutes")->capture_default_str();
  casc->callback([&ctx, &action, window] { action = [&ctx, window] { run_cascades(ctx, *window); }; });

  auto* tr = app.add_subcommand("trends", "Keyword series, period comparisons, hourly profiles");
  auto flags = std::make_shared<TrendFlags>();
  tr->add_option("--keyword", flags->keywords, "Keyword(s); stemmed before matching");
  tr->add_option("--period", flags->periods, "Two periods FROM:TO (YYYY-MM-DD)");
  tr->add_option("--metric", flags->metrics, "Metrics to compare (default all)");
  tr->add_option("--bucket", flags->bucket, "Profile bucket minutes, 30 or 60")->capture_default_str();
  tr->callback([&ctx, &action, flags] { action = [&ctx, flags] { run_trends(ctx, *flags); }; });
}

}  // namespace chatlens::cli
