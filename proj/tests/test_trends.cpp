#include <doctest.h>

#include <numeric>
#include <sstream>

#include "chatlens/error.hpp"
#include "chatlens/trends.hpp"
#include "support.hpp"

using namespace chatlens;
using chatlens::testing::corpus_of;
using chatlens::testing::text_message;
using doctest::Approx;

namespace {

const char* kA = "+573001111111";
const char* kB = "+584121234567";
const char* kC = "+573002222222";

LocalDate day(const char* iso) { return *parse_date(iso); }

// Local dates at -05:00: everything but the last message falls on Sunday 2020-03-01.
Corpus border_chat() {
  auto image = text_message("i1", "g3", kA, "2020-03-01T18:00:00Z", "");
  image.kind = MessageKind::Image;
  image.text.reset();
  image.media_hash = "h1";
  return corpus_of({
      text_message("t1", "g1", kA, "2020-03-01T15:00:00Z", "las trochas estan llenas de gente"),
      text_message("t2", "g1", kB, "2020-03-01T16:00:00Z", "vamos al mercado comprar frutas frescas"),
      text_message("t3", "g2", kC, "2020-03-01T17:00:00Z", "cruzamos por las trochas anoche tarde"),
      image,
      text_message("t4", "g1", kA, "2020-03-02T04:30:00Z", "compramos comida para toda familia"),
      text_message("t5", "g2", kB, "2020-03-02T06:00:00Z", "mañana sale el bus temprano desde terminal"),
  });
}

}  // namespace

TEST_CASE("keyword share at three granularities") {
  const Corpus c = border_chat();
  const std::vector<std::string> stems{"troch"};
  const auto msg = trends::keyword_daily_share(c, stems, trends::Granularity::Message, 3);
  REQUIRE(msg.points.size() == 2);
  CHECK(msg.points[0].date == day("2020-03-01"));
  CHECK(msg.points[0].numerator == 2);
  CHECK(msg.points[0].denominator == 4);
  CHECK(msg.points[0].value == 0.5);
  CHECK(msg.points[1].value == 0.0);

  const auto groups = trends::keyword_daily_share(c, stems, trends::Granularity::Group, 3);
  CHECK(groups.points[0].numerator == 2);
  CHECK(groups.points[0].denominator == 3);

  const auto users = trends::keyword_daily_share(c, stems, trends::Granularity::User, 3);
  CHECK(users.points[0].numerator == 2);
  CHECK(users.points[0].denominator == 3);

  const auto utc = trends::keyword_daily_share(c, stems, trends::Granularity::Message, 3, TzOffset{0});
  CHECK(utc.points[0].denominator == 3);
  CHECK(utc.points[1].denominator == 2);

  CHECK(trends::keyword_daily_share(c, stems, trends::Granularity::Message, 50).points.empty());
  CHECK_THROWS_AS(trends::keyword_daily_share(c, {}, trends::Granularity::Message), ArgumentError);
  CHECK_THROWS_AS(trends::parse_granularity("week"), ArgumentError);
}

TEST_CASE("hourly profile") {
  const Corpus c = border_chat();
  const auto all = trends::hourly_profile(c, std::nullopt, std::nullopt);
  CHECK(all.count == 6);
  REQUIRE(all.proportions.size() == 24);
  CHECK(std::accumulate(all.proportions.begin(), all.proportions.end(), 0.0) == Approx(1.0));
  CHECK(all.proportions[10] == Approx(1.0 / 6));
  CHECK(all.proportions[23] == Approx(1.0 / 6));
  CHECK(all.nocturnal_share == Approx(1.0 / 6));

  const auto weekday = trends::hourly_profile(c, std::nullopt, trends::DayClass::Weekday);
  CHECK(weekday.count == 1);
  CHECK(weekday.proportions[1] == 1.0);
  CHECK(weekday.nocturnal_share == 1.0);
  const auto weekend = trends::hourly_profile(c, std::nullopt, trends::DayClass::Weekend);
  CHECK(weekend.count == 5);

  const auto ve = trends::hourly_profile(c, Country::VE, std::nullopt);
  CHECK(ve.count == 2);
  const auto half = trends::hourly_profile(c, std::nullopt, std::nullopt, 30);
  CHECK(half.proportions.size() == 48);
  CHECK(half.proportions[47] == Approx(1.0 / 6));
  CHECK_THROWS_AS(trends::hourly_profile(c, std::nullopt, std::nullopt, 45), ArgumentError);

  const auto none = trends::hourly_profile(c, Country::MX, std::nullopt);
  CHECK(none.count == 0);
  CHECK(none.nocturnal_share == 0.0);

  std::ostringstream out;
  trends::write_profile_csv(out, half);
  CHECK(out.str().rfind("bucket_start,proportion\n00:00,", 0) == 0);
}

TEST_CASE("period comparison") {
  const Corpus c = border_chat();
  const trends::Period sunday{day("2020-03-01"), day("2020-03-01")};
  const trends::Period monday{day("2020-03-02"), day("2020-03-02")};
  const trends::Period both{day("2020-03-01"), day("2020-03-02")};
  CHECK_THROWS_AS(trends::period_compare(c, sunday, both, trends::Metric::TextWords), ArgumentError);
  CHECK_THROWS_AS(trends::period_compare(c, sunday, monday, trends::Metric::TextWords), UndefinedError);

  const auto words = trends::metric_observations(c, trends::Metric::TextWords, sunday);
  CHECK(words == std::vector<double>{6, 6, 6, 5});
  CHECK(trends::metric_observations(c, trends::Metric::MessagesPerUserDay, sunday) ==
        std::vector<double>{3, 1, 1});

  trends::CompareOptions fwd;
  fwd.forwarded = true;
  CHECK(trends::metric_observations(c, trends::Metric::TextWords, sunday, fwd).empty());

  std::vector<Message> msgs;
  for (int i = 0; i < 6; ++i) {
    const std::string sent = "2020-03-0" + std::to_string(i < 3 ? 3 : 6) + "T1" + std::to_string(i) + ":00:00Z";
    msgs.push_back(text_message("p" + std::to_string(i), "g", kA, sent.c_str(),
                                std::string(i < 3 ? "uno dos" : "uno dos tres cuatro") + (i % 2 ? " cinco" : "")));
  }
  const Corpus two = corpus_of(msgs);
  const auto cmp = trends::period_compare(two, {day("2020-03-03"), day("2020-03-04")},
                                          {day("2020-03-05"), day("2020-03-07")}, trends::Metric::TextWords);
  CHECK(cmp.n_a == 3);
  CHECK(cmp.n_b == 3);
  CHECK(cmp.welch.mean_a == Approx(7.0 / 3));
  CHECK(cmp.welch.mean_b == Approx(14.0 / 3));
  CHECK(cmp.welch.t < 0);
}

TEST_CASE("falsification trend recovers a linear drift") {
  std::vector<Message> msgs;
  for (int k = 0; k < 8; ++k) {
    std::string words;
    for (int w = 0; w < k + 2; ++w) words += w ? " palabra" : "palabra";
    char sent[32];
    std::snprintf(sent, sizeof sent, "2020-03-01T%02d:00:00Z", 15 + k);
    msgs.push_back(text_message("f" + std::to_string(k), "g", kA, sent, words));
  }
  const auto fit = trends::falsification_trend(corpus_of(msgs), trends::Metric::TextWords);
  CHECK(fit.coefficient("elapsed_seconds") == Approx(1.0 / 3600).epsilon(1e-9));
  CHECK(fit.coefficient("(intercept)") == Approx(-8.0).epsilon(1e-9));
  CHECK(fit.r_squared == Approx(1.0));
  CHECK_THROWS_AS(trends::falsification_trend(corpus_of(msgs), trends::Metric::AudioSeconds), UndefinedError);
}

TEST_CASE("user-day activity") {
  const auto rows = trends::user_day_activity(border_chat());
  std::size_t total = 0;
  for (const auto& r : rows) total += r.messages;
  CHECK(total == 6);
  CHECK(rows.size() == 4);
}

TEST_CASE("metric names round trip") {
  for (auto m : {trends::Metric::TextWords, trends::Metric::TextChars, trends::Metric::AudioSeconds,
                 trends::Metric::VideoSeconds, trends::Metric::MessagesPerUserDay, trends::Metric::RepliesPerMessage,
                 trends::Metric::CascadeVirality, trends::Metric::KeywordShare}) {
    CHECK(trends::parse_metric(trends::to_string(m)) == m);
  }
  CHECK_THROWS_AS(trends::parse_metric("mood"), ArgumentError);
}
