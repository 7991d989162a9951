#include "chatlens/activity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <tuple>

#include "chatlens/csv.hpp"
#include "chatlens/error.hpp"
#include "chatlens/graph.hpp"
#include "chatlens/membership.hpp"
#include "chatlens/text.hpp"

namespace chatlens::activity {

ShareDistribution ShareDistribution::from_counts(const std::vector<std::size_t>& counts) {
  ShareDistribution d;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    d.counts["s" + std::to_string(i)] = counts[i];
    d.total += counts[i];
  }
  return d;
}

std::vector<double> ShareDistribution::shares() const {
  std::vector<double> out;
  out.reserve(counts.size());
  for (const auto& [s, c] : counts) out.push_back(static_cast<double>(c) / static_cast<double>(total));
  return out;
}

ShareDistribution share_distribution(const Corpus& corpus, std::string_view group_uid) {
  ShareDistribution d;
  for (std::size_t i : corpus.group_message_indices(group_uid)) {
    ++d.counts[corpus.messages()[i].sender.e164];
    ++d.total;
  }
  return d;
}

double activity_rate(const Corpus& corpus, std::string_view group_uid, TzOffset tz) {
  auto idx = corpus.group_message_indices(group_uid);
  if (idx.empty()) throw UndefinedError("activity rate undefined for empty group " + std::string(group_uid));
  LocalDate first{}, last{};
  bool init = false;
  for (std::size_t i : idx) {
    LocalDate d = local_date(corpus.messages()[i].sent_time, tz);
    if (!init || d < first) first = d;
    if (!init || d > last) last = d;
    init = true;
  }
  double span = static_cast<double>(last.days - first.days + 1);
  return static_cast<double>(idx.size()) / span;
}

double hh_concentration(const ShareDistribution& d) {
  double s = 0;
  for (double p : d.shares()) s += p * p;
  return s;
}

double top5_concentration(const ShareDistribution& d) {
  std::vector<std::size_t> c;
  for (const auto& [s, n] : d.counts) c.push_back(n);
  std::sort(c.begin(), c.end(), std::greater<>());
  std::size_t top = 0;
  for (std::size_t i = 0; i < c.size() && i < 5; ++i) top += c[i];
  return d.total == 0 ? 0.0 : static_cast<double>(top) / static_cast<double>(d.total);
}

double gini(const ShareDistribution& d) {
  std::vector<double> x;
  for (const auto& [s, n] : d.counts) x.push_back(static_cast<double>(n));
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  const double total = std::accumulate(x.begin(), x.end(), 0.0);
  if (x.empty() || total == 0) return 0.0;
  double num = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (2.0 * static_cast<double>(i + 1) - n - 1.0) * x[i];
  }
  return num / (n * total);
}

std::vector<std::pair<double, double>> lorenz_curve(const ShareDistribution& d) {
  std::vector<double> x;
  for (const auto& [s, n] : d.counts) x.push_back(static_cast<double>(n));
  std::sort(x.begin(), x.end());
  std::vector<std::pair<double, double>> pts{{0.0, 0.0}};
  double cum = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    cum += x[i];
    pts.emplace_back(static_cast<double>(i + 1) / static_cast<double>(x.size()),
                     cum / static_cast<double>(d.total));
  }
  return pts;
}

Summary summarize(std::vector<double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  auto rank = [&](double p) {
    auto r = static_cast<std::size_t>(std::ceil(p * static_cast<double>(values.size()) / 100.0));
    return values[std::clamp<std::size_t>(r, 1, values.size()) - 1];
  };
  s.p25 = rank(25);
  s.median = rank(50);
  s.p75 = rank(75);
  s.p90 = rank(90);
  s.min = values.front();
  s.max = values.back();
  return s;
}

LengthStats length_stats(const Corpus& corpus, const LengthFilter& filter) {
  std::vector<double> words, chars, seconds;
  LengthStats out;
  for (const auto& m : corpus.messages()) {
    if (filter.kind && m.kind != *filter.kind) continue;
    if (filter.forwarded && m.forwarded != *filter.forwarded) continue;
    if (filter.group_uid && m.group_uid != *filter.group_uid) continue;
    if (m.text) {
      std::size_t w = text::word_count(*m.text);
      if (w > 0) {
        words.push_back(static_cast<double>(w));
        chars.push_back(static_cast<double>(text::utf8_length(*m.text)));
        if (w == 1) ++out.one_word_messages;
      }
    }
    if (m.media_duration_s) seconds.push_back(static_cast<double>(*m.media_duration_s));
  }
  out.words = summarize(std::move(words));
  out.characters = summarize(std::move(chars));
  out.media_seconds = summarize(std::move(seconds));
  return out;
}

std::vector<ReshareRecord> reshare_analysis(const Corpus& corpus, MessageKind kind, TzOffset tz) {
  if (kind != MessageKind::Image && kind != MessageKind::Video) {
    throw ArgumentError("reshare analysis supports image and video only");
  }
  using Identity = std::tuple<std::string, std::optional<std::int64_t>>;
  std::map<Identity, std::vector<std::size_t>> shares;
  for (std::size_t i = 0; i < corpus.messages().size(); ++i) {
    const Message& m = corpus.messages()[i];
    if (m.kind != kind || !m.media_hash) continue;
    Identity id{*m.media_hash, kind == MessageKind::Video ? m.media_duration_s : std::nullopt};
    shares[id].push_back(i);
  }

  std::map<std::string, GroupCharacteristics> cache;
  graph::SimpleGraph group_graph;
  bool graph_built = false;
  auto characteristics = [&](const std::string& uid) -> const GroupCharacteristics& {
    auto it = cache.find(uid);
    if (it != cache.end()) return it->second;
    if (!graph_built) {
      group_graph = graph::build_group_graph(corpus);
      graph_built = true;
    }
    GroupCharacteristics c;
    auto dist = membership::country_distribution(corpus, uid);
    auto shares_d = share_distribution(corpus, uid);
    c.size = dist.member_count;
    c.entropy = membership::entropy(dist);
    c.degree = group_graph.degree(*group_graph.find(uid));
    c.activity = activity_rate(corpus, uid, tz);
    c.hh = hh_concentration(shares_d);
    c.gini = gini(shares_d);
    return cache.emplace(uid, c).first->second;
  };

  std::vector<ReshareRecord> out;
  for (const auto& [id, idx] : shares) {
    const auto& msgs = corpus.messages();
    auto first = *std::min_element(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return std::tie(msgs[a].sent_time, msgs[a].provenance.read_time, a) <
             std::tie(msgs[b].sent_time, msgs[b].provenance.read_time, b);
    });
    Timestamp last = msgs[idx.front()].sent_time;
    std::set<std::string> groups;
    for (std::size_t i : idx) {
      last = std::max(last, msgs[i].sent_time);
      groups.insert(msgs[i].group_uid);
    }
    ReshareRecord r;
    r.media_hash = std::get<0>(id);
    r.kind = kind;
    r.duration_s = std::get<1>(id);
    r.n_shares = idx.size();
    r.n_groups = groups.size();
    r.first_group_uid = msgs[first].group_uid;
    r.first_time = msgs[first].sent_time;
    r.last_time = last;
    r.span_hours = static_cast<double>(last.seconds - r.first_time.seconds) / 3600.0;
    r.first_group = characteristics(r.first_group_uid);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<GroupActivityRow> activity_table(const Corpus& corpus, TzOffset tz) {
  std::vector<GroupActivityRow> rows;
  for (const auto& [uid, g] : corpus.groups()) {
    auto d = share_distribution(corpus, uid);
    if (d.total == 0) continue;
    rows.push_back({uid, d.total, activity_rate(corpus, uid, tz), hh_concentration(d),
                    top5_concentration(d), gini(d)});
  }
  return rows;
}

void write_activity_csv(std::ostream& out, const std::vector<GroupActivityRow>& rows) {
  csv::Writer w(out);
  w.header({"group_uid", "activity", "hh", "top5", "gini"});
  for (const auto& r : rows) {
    w << r.group_uid << r.activity << r.hh << r.top5 << r.gini;
    w.end_row();
  }
}

void write_reshare_csv(std::ostream& out, const std::vector<ReshareRecord>& rows) {
  csv::Writer w(out);
  w.header({"media_hash", "kind", "n_shares", "span_hours", "first_group", "duration_s", "n_groups",
            "first_time", "group_size", "group_entropy", "group_degree", "group_activity",
            "group_hh", "group_gini"});
  for (const auto& r : rows) {
    w << r.media_hash << to_string(r.kind) << r.n_shares << r.span_hours << r.first_group_uid;
    if (r.duration_s) {
      w << *r.duration_s;
    } else {
      w << "";
    }
    w << r.n_groups << format_iso8601_minutes(r.first_time, TzOffset{0}) << r.first_group.size
      << r.first_group.entropy << r.first_group.degree << r.first_group.activity << r.first_group.hh
      << r.first_group.gini;
    w.end_row();
  }
}

}  // namespace chatlens::activity
