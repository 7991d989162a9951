#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "chatlens/error.hpp"
#include "chatlens/ingest.hpp"
#include "support.hpp"

using namespace chatlens;
using chatlens::testing::at;
using chatlens::testing::text_message;

namespace {

Message read_copy(Message m, const char* server, const char* read_time) {
  m.provenance = {server, at(read_time)};
  return m;
}

const char* kLine =
    R"({"id":"m1","group_uid":null,"group_title":"Venezolanos en Cali","group_icon_uid":null,"server":"A",)"
    R"("read_time":"2020-03-01T12:00:00-05:00","sent_time":"2020-03-01T10:15:42-05:00","sender":"+584121234567",)"
    R"("kind":"text","text":"hola a todos","media_hash":null,"media_duration_s":null,"has_emoji":false,)"
    R"("forwarded":true,"reply_to":""})";

}  // namespace

TEST_CASE("parse_record derives the uid and truncates to the minute") {
  auto r = ingest::parse_record(kLine);
  CHECK(r.message.group_uid == sha256_hex("Venezolanos en Cali"));
  CHECK(r.message.sent_time == at("2020-03-01T15:15Z"));
  CHECK(r.message.sender.country.tag == Country::VE);
  CHECK(r.message.forwarded);
  CHECK_FALSE(r.message.reply_to);
  CHECK(r.group_title == "Venezolanos en Cali");
}

TEST_CASE("parse_record takes the uid from an icon link") {
  std::string line = kLine;
  line.replace(line.find(R"("group_icon_uid":null)"), 21,
               R"("group_icon_uid":"https://pps.whatsapp.net/x.jpg?u=573001112233-1580000000%40g.us")");
  CHECK(ingest::parse_record(line).message.group_uid == "573001112233-1580000000");
}

TEST_CASE("parse_record rejects malformed fields with their names") {
  auto error_of = [](std::string line) {
    try {
      ingest::parse_record(line);
    } catch (const DataError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  std::string line = kLine;
  CHECK(error_of("{not json").find("invalid JSON") != std::string::npos);
  auto bad_sender = line;
  bad_sender.replace(bad_sender.find("+584121234567"), 13, "+58abc");
  CHECK(error_of(bad_sender).find("phone") != std::string::npos);
  auto bad_kind = line;
  bad_kind.replace(bad_kind.find(R"("kind":"text")"), 13, R"("kind":"gif")");
  CHECK(error_of(bad_kind).find("gif") != std::string::npos);
  auto late = line;
  late.replace(late.find("2020-03-01T12:00:00"), 19, "2020-03-01T09:00:00");
  CHECK(error_of(late).find("after read_time") != std::string::npos);
  auto no_id = line;
  no_id.replace(no_id.find(R"("id":"m1",)"), 10, "");
  CHECK(error_of(no_id).find("'id'") != std::string::npos);
}

TEST_CASE("read_log_stream collects rejects with line numbers") {
  std::istringstream in(std::string(kLine) + "\n\n{broken\n" + kLine + "\n");
  auto r = ingest::read_log_stream(in, "a.jsonl");
  CHECK(r.records.size() == 2);
  REQUIRE(r.rejects.size() == 1);
  CHECK(r.rejects[0].line_no == 3);
  CHECK(r.rejects[0].file == "a.jsonl");
  CHECK(r.records[1].line_no == 4);
}

TEST_CASE("to_log_line round-trips through parse_record") {
  Message m = text_message("x9", "g1", "+573001234567", "2020-03-02T08:09Z", "ñandú, \"comillas\" y 😀");
  m.reply_to = "x1";
  m.has_emoji = true;
  m.provenance = {"B", at("2020-03-02T09:00:30Z")};
  Group g{"g1", "Título", std::nullopt, {}};
  for (int tz : {-300, 0, 60}) {
    auto r = ingest::parse_record(ingest::to_log_line(m, &g, TzOffset{tz}));
    CHECK(r.message == m);
    CHECK(r.group_title == "Título");
  }
}

TEST_CASE("re-reads collapse, true duplicates inside one reading survive") {
  auto a = text_message("1", "g", "+573001234567", "2020-03-01T10:00Z", "hola");
  auto b = text_message("2", "g", "+573001234567", "2020-03-01T10:00:30Z", "hola");  // same minute
  auto c = text_message("3", "g", "+584121234567", "2020-03-01T10:05Z", "otro");
  std::vector<Message> in{
      read_copy(a, "A", "2020-03-01T11:00Z"), read_copy(b, "A", "2020-03-01T11:00Z"),
      read_copy(a, "B", "2020-03-01T11:30Z"), read_copy(c, "B", "2020-03-01T11:30Z"),
      read_copy(c, "A", "2020-03-01T17:00Z"),
  };
  auto [out, report] = ingest::dedup_messages(in);
  REQUIRE(out.size() == 3);
  CHECK(out[0].id == "1");
  CHECK(out[1].id == "2");
  CHECK(out[0].provenance.server == "A");
  CHECK(out[2].provenance.read_time == at("2020-03-01T11:30Z"));
  CHECK(report.removed == 2);
  CHECK(report.true_duplicates_kept == 1);
  CHECK(report.per_group.at("g").read == 5);
}

TEST_CASE("messages without content identity are always kept") {
  Message m = text_message("1", "g", "+573001234567", "2020-03-01T10:00Z", "x");
  m.kind = MessageKind::Other;
  m.text.reset();
  auto [out, report] = ingest::dedup_messages({read_copy(m, "A", "2020-03-01T11:00Z"), read_copy(m, "B", "2020-03-01T11:00Z")});
  CHECK(out.size() == 2);
}

TEST_CASE("dedup is idempotent and never increases any key count") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Message> in;
    for (int i = 0; i < 60; ++i) {
      auto m = text_message(std::to_string(i), "g" + std::to_string(rng() % 2), rng() % 2 ? "+573001234567" : "+584121234567",
                            "2020-03-01T10:00Z", std::string(1, char('a' + rng() % 3)));
      m.sent_time.seconds += static_cast<std::int64_t>(rng() % 4) * 60;
      m.provenance = {rng() % 2 ? "A" : "B", Timestamp{1583100000 + static_cast<std::int64_t>(rng() % 3) * 3600}};
      in.push_back(m);
    }
    auto once = ingest::dedup_messages(in).first;
    auto twice = ingest::dedup_messages(once).first;
    CHECK(once == twice);
    CHECK(once.size() <= in.size());
    CHECK(std::is_sorted(once.begin(), once.end(),
                         [](const Message& x, const Message& y) { return x.sent_time < y.sent_time; }));
  }
}

TEST_CASE("renamed group merges into the group read first") {
  std::vector<Message> msgs;
  const char* words[] = {"frontera cerrada hoy en cucuta", "precio del dolar sube", "bus sale a las ocho",
                         "alguien tiene cupo para viajar", "gracias hermanos por la ayuda"};
  for (int i = 0; i < 5; ++i) {
    auto m = text_message("o" + std::to_string(i), "old", "+573001234567", "2020-03-01T10:00Z", words[i]);
    m.sent_time.seconds += i * 600;
    msgs.push_back(read_copy(m, "A", "2020-03-01T12:00Z"));
    if (i >= 1) {
      m.group_uid = "new";
      msgs.push_back(read_copy(m, "A", "2020-03-01T18:00Z"));
    }
  }
  auto other = text_message("z", "third", "+584121234567", "2020-03-01T10:00Z", "vendo carro usado barato");
  msgs.push_back(read_copy(other, "B", "2020-03-01T12:00Z"));
  auto corpus = chatlens::testing::corpus_of(msgs);
  auto [merged, report] = ingest::resolve_group_variants(corpus);
  REQUIRE(report.merges.size() == 1);
  CHECK(report.merges[0].absorbed_uid == "new");
  CHECK(report.merges[0].surviving_uid == "old");
  CHECK(report.merges[0].identical_fraction == 1.0);
  CHECK(merged.groups().size() == 2);
  CHECK(merged.group("old").merged_from == std::vector<std::string>{"new"});
  CHECK(merged.group_message_indices("old").size() == 5);
}

TEST_CASE("groups below the identical fraction stay apart") {
  std::vector<Message> msgs;
  for (int i = 0; i < 5; ++i) {
    auto m = text_message("a" + std::to_string(i), "g1", "+573001234567", "2020-03-01T10:00Z", "frontera cerrada hoy");
    m.sent_time.seconds += i * 600;
    msgs.push_back(read_copy(m, "A", "2020-03-01T12:00Z"));
    m.group_uid = "g2";
    m.sender = parse_phone("+584121234567");
    msgs.push_back(read_copy(m, "A", "2020-03-01T12:00Z"));
  }
  auto [merged, report] = ingest::resolve_group_variants(chatlens::testing::corpus_of(msgs));
  CHECK(report.merges.empty());
  CHECK(merged.groups().size() == 2);
}

TEST_CASE("canonical corpus round-trips") {
  std::vector<Message> msgs;
  for (int i = 0; i < 4; ++i) {
    auto m = text_message("m" + std::to_string(i), i % 2 ? "g1" : "g2", "+573001234567", "2020-03-01T10:00Z",
                          "texto " + std::to_string(i));
    m.sent_time.seconds += i * 60;
    m.provenance = {"A", at("2020-03-01T12:00Z")};
    msgs.push_back(m);
  }
  msgs[3].kind = MessageKind::Video;
  msgs[3].text.reset();
  msgs[3].media_hash = "abcd";
  msgs[3].media_duration_s = 31;
  std::map<std::string, Group> groups{{"g1", Group{"g1", "Uno", "57-1", {"g0"}}}, {"g2", Group{"g2", "Dos", std::nullopt, {}}}};
  Corpus c(groups, msgs);
  const std::string dir = (std::filesystem::temp_directory_path() / "chatlens_roundtrip").string();
  std::filesystem::create_directories(dir);
  {
    std::ofstream m(dir + "/corpus.jsonl"), g(dir + "/groups.jsonl");
    ingest::write_corpus(c, m, g);
  }
  CHECK(ingest::read_corpus(dir + "/corpus.jsonl", dir + "/groups.jsonl") == c);
}
