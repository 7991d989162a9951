#include "chatlens/trends.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>

#include "chatlens/cascades.hpp"
#include "chatlens/csv.hpp"
#include "chatlens/error.hpp"
#include "chatlens/text.hpp"

namespace chatlens::trends {

Granularity parse_granularity(std::string_view s) {
  if (s == "message") return Granularity::Message;
  if (s == "group") return Granularity::Group;
  if (s == "user") return Granularity::User;
  throw ArgumentError("unknown granularity '" + std::string(s) + "'");
}

namespace {

constexpr std::pair<Metric, std::string_view> kMetricNames[] = {
    {Metric::TextWords, "text_words"},
    {Metric::TextChars, "text_chars"},
    {Metric::AudioSeconds, "audio_seconds"},
    {Metric::VideoSeconds, "video_seconds"},
    {Metric::MessagesPerUserDay, "messages_per_user_day"},
    {Metric::RepliesPerMessage, "replies_per_message"},
    {Metric::CascadeVirality, "cascade_virality"},
    {Metric::KeywordShare, "keyword_share"},
};

bool matches(const text::TokenList& tokens, const std::vector<std::string>& stems) {
  for (const auto& t : tokens) {
    for (const auto& s : stems) {
      if (t.compare(0, s.size(), s) == 0) return true;
    }
  }
  return false;
}

bool passes(const Message& m, const CompareOptions& o) { return !o.forwarded || m.forwarded == *o.forwarded; }

// Per-message scalar for the length metrics, nullopt when the message does not qualify.
std::optional<double> length_value(const Message& m, Metric metric) {
  switch (metric) {
    case Metric::TextWords:
    case Metric::TextChars: {
      if (m.kind != MessageKind::Text || !m.text) return std::nullopt;
      const std::size_t w = text::word_count(*m.text);
      if (w == 0) return std::nullopt;
      return metric == Metric::TextWords ? static_cast<double>(w) : static_cast<double>(text::utf8_length(*m.text));
    }
    case Metric::AudioSeconds:
    case Metric::VideoSeconds: {
      const MessageKind want = metric == Metric::AudioSeconds ? MessageKind::Audio : MessageKind::Video;
      if (m.kind != want || !m.media_duration_s) return std::nullopt;
      return static_cast<double>(*m.media_duration_s);
    }
    default:
      throw ArgumentError("metric '" + std::string(to_string(metric)) + "' is not a per-message length");
  }
}

}  // namespace

Metric parse_metric(std::string_view s) {
  for (const auto& [m, name] : kMetricNames) {
    if (name == s) return m;
  }
  throw ArgumentError("unknown metric '" + std::string(s) + "'");
}

std::string_view to_string(Metric m) {
  for (const auto& [mm, name] : kMetricNames) {
    if (mm == m) return name;
  }
  return "unknown";
}

DailySeries keyword_daily_share(const Corpus& corpus, const std::vector<std::string>& stems, Granularity granularity,
                                std::size_t min_words, TzOffset tz) {
  if (stems.empty()) throw ArgumentError("keyword share needs at least one stem");
  struct Day {
    std::size_t texts = 0, text_hits = 0;
    std::set<std::string> active_groups, hit_groups;
    std::set<std::string> text_users, hit_users;
  };
  std::map<LocalDate, Day> days;
  for (const auto& m : corpus.messages()) {
    Day& d = days[local_date(m.sent_time, tz)];
    d.active_groups.insert(m.group_uid);
    if (m.kind != MessageKind::Text || !m.text) continue;
    auto tokens = text::tokenize(*m.text);
    if (tokens.size() < min_words) continue;
    ++d.texts;
    d.text_users.insert(m.sender.e164);
    if (matches(tokens, stems)) {
      ++d.text_hits;
      d.hit_groups.insert(m.group_uid);
      d.hit_users.insert(m.sender.e164);
    }
  }
  DailySeries series;
  for (const auto& [date, d] : days) {
    DailyPoint p;
    p.date = date;
    switch (granularity) {
      case Granularity::Message:
        p.numerator = d.text_hits;
        p.denominator = d.texts;
        break;
      case Granularity::Group:
        p.numerator = d.hit_groups.size();
        p.denominator = d.active_groups.size();
        break;
      case Granularity::User:
        p.numerator = d.hit_users.size();
        p.denominator = d.text_users.size();
        break;
    }
    if (p.denominator == 0) continue;
    p.value = static_cast<double>(p.numerator) / static_cast<double>(p.denominator);
    series.points.push_back(p);
  }
  return series;
}

std::vector<UserDay> user_day_activity(const Corpus& corpus, TzOffset tz) {
  std::map<std::pair<std::string, LocalDate>, std::size_t> counts;
  for (const auto& m : corpus.messages()) ++counts[{m.sender.e164, local_date(m.sent_time, tz)}];
  std::vector<UserDay> out;
  out.reserve(counts.size());
  for (const auto& [key, n] : counts) out.push_back({key.first, key.second, n});
  return out;
}

std::vector<double> metric_observations(const Corpus& corpus, Metric metric, const Period& period,
                                        const CompareOptions& options) {
  std::vector<double> out;
  const auto& msgs = corpus.messages();
  auto in_period = [&](const Message& m) { return period.contains(local_date(m.sent_time, options.tz)); };
  switch (metric) {
    case Metric::TextWords:
    case Metric::TextChars:
    case Metric::AudioSeconds:
    case Metric::VideoSeconds:
      for (const auto& m : msgs) {
        if (!in_period(m) || !passes(m, options)) continue;
        if (auto v = length_value(m, metric)) out.push_back(*v);
      }
      break;
    case Metric::MessagesPerUserDay: {
      std::map<std::pair<std::string, LocalDate>, std::size_t> counts;
      for (const auto& m : msgs) {
        if (in_period(m) && passes(m, options)) ++counts[{m.sender.e164, local_date(m.sent_time, options.tz)}];
      }
      for (const auto& [k, n] : counts) out.push_back(static_cast<double>(n));
      break;
    }
    case Metric::RepliesPerMessage: {
      std::vector<std::size_t> replies(msgs.size(), 0);
      for (const auto& m : msgs) {
        if (!m.reply_to) continue;
        if (auto p = corpus.index_of(*m.reply_to)) ++replies[*p];
      }
      for (std::size_t i = 0; i < msgs.size(); ++i) {
        if (in_period(msgs[i]) && passes(msgs[i], options)) out.push_back(static_cast<double>(replies[i]));
      }
      break;
    }
    case Metric::CascadeVirality: {
      auto forest = cascades::resolve_replies(corpus);
      for (const auto& g : forest.cascades) {
        const Message* root = corpus.find(g.root());
        if (root && in_period(*root) && passes(*root, options)) out.push_back(cascades::virality_ours(g));
      }
      break;
    }
    case Metric::KeywordShare: {
      auto series = keyword_daily_share(corpus, options.stems, Granularity::Message, options.min_words, options.tz);
      for (const auto& p : series.points) {
        if (period.contains(p.date)) out.push_back(p.value);
      }
      break;
    }
  }
  return out;
}

PeriodComparison period_compare(const Corpus& corpus, const Period& a, const Period& b, Metric metric,
                                const CompareOptions& options) {
  if (a.from > a.to || b.from > b.to) throw ArgumentError("period start is after its end");
  if (!(a.to < b.from || b.to < a.from)) throw ArgumentError("comparison periods overlap");
  auto xa = metric_observations(corpus, metric, a, options);
  auto xb = metric_observations(corpus, metric, b, options);
  if (xa.size() < 2 || xb.size() < 2) {
    throw UndefinedError("period comparison of " + std::string(to_string(metric)) +
                         " needs two observations per period (got " + std::to_string(xa.size()) + " and " +
                         std::to_string(xb.size()) + ")");
  }
  PeriodComparison c;
  c.n_a = xa.size();
  c.n_b = xb.size();
  c.welch = stats::welch_t(xa, xb);
  return c;
}

HourlyProfile hourly_profile(const Corpus& corpus, std::optional<Country> country, std::optional<DayClass> day_class,
                             std::size_t bucket_minutes, TzOffset tz) {
  if (bucket_minutes != 30 && bucket_minutes != 60) throw ArgumentError("bucket size must be 30 or 60 minutes");
  HourlyProfile p;
  p.bucket_minutes = bucket_minutes;
  std::vector<std::size_t> counts(1440 / bucket_minutes, 0);
  std::size_t night = 0;
  for (const auto& m : corpus.messages()) {
    if (country && m.sender.country.tag != *country) continue;
    if (day_class) {
      const bool weekend = local_weekday(m.sent_time, tz) >= 6;
      if (weekend != (*day_class == DayClass::Weekend)) continue;
    }
    const int minute = local_minute_of_day(m.sent_time, tz);
    ++counts[static_cast<std::size_t>(minute) / bucket_minutes];
    if (minute < 5 * 60) ++night;
    ++p.count;
  }
  p.proportions.assign(counts.size(), 0.0);
  if (p.count > 0) {
    for (std::size_t i = 0; i < counts.size(); ++i) {
      p.proportions[i] = static_cast<double>(counts[i]) / static_cast<double>(p.count);
    }
    p.nocturnal_share = static_cast<double>(night) / static_cast<double>(p.count);
  }
  return p;
}

stats::OlsFit falsification_trend(const Corpus& corpus, Metric metric, TzOffset tz) {
  if (corpus.messages().empty()) throw UndefinedError("trend regression on an empty corpus");
  Timestamp first = corpus.messages().front().sent_time;
  for (const auto& m : corpus.messages()) first = std::min(first, m.sent_time);
  const Timestamp origin = start_of_day(local_date(first, tz), tz);
  std::vector<double> x, y;
  for (const auto& m : corpus.messages()) {
    if (auto v = length_value(m, metric)) {
      x.push_back(static_cast<double>(m.sent_time.seconds - origin.seconds));
      y.push_back(*v);
    }
  }
  if (y.size() < 3) throw UndefinedError("trend regression needs at least three observations");
  return stats::ols({{"elapsed_seconds", std::move(x)}}, y);
}

void write_series_csv(std::ostream& out, const DailySeries& series) {
  csv::Writer w(out);
  w.header({"date", "value", "numerator", "denominator"});
  for (const auto& p : series.points) {
    w << format_date(p.date) << p.value << p.numerator << p.denominator;
    w.end_row();
  }
}

void write_profile_csv(std::ostream& out, const HourlyProfile& profile) {
  csv::Writer w(out);
  w.header({"bucket_start", "proportion"});
  for (std::size_t i = 0; i < profile.proportions.size(); ++i) {
    const std::size_t minute = i * profile.bucket_minutes;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%02zu:%02zu", minute / 60, minute % 60);
    w << buf << profile.proportions[i];
    w.end_row();
  }
}

void write_comparison_csv(std::ostream& out, const std::vector<std::pair<std::string, PeriodComparison>>& rows) {
  csv::Writer w(out);
  w.header({"metric", "n_a", "n_b", "mean_a", "mean_b", "t", "dof", "p"});
  for (const auto& [name, c] : rows) {
    w << name << c.n_a << c.n_b << c.welch.mean_a << c.welch.mean_b << c.welch.t << c.welch.dof << c.welch.p;
    w.end_row();
  }
}

}  // namespace chatlens::trends
