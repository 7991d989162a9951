#include <doctest.h>

#include "chatlens/corpus.hpp"
#include "chatlens/error.hpp"
#include "support.hpp"

using namespace chatlens;
using chatlens::testing::text_message;

TEST_CASE("phone numbers resolve by longest prefix") {
  auto co = parse_phone("+573001234567");
  CHECK(co.country.tag == Country::CO);
  CHECK(co.national == "3001234567");
  CHECK(parse_phone("584121234567").country.tag == Country::VE);
  CHECK(parse_phone("+593991234567").country.tag == Country::EC);
  auto other = parse_phone("+59171234567");
  CHECK(other.country.tag == Country::Other);
  CHECK(other.country.to_string() == "OTHER(591)");
  CHECK(parse_phone("+13055551234").country.tag == Country::US);
  CHECK_THROWS_AS(parse_phone("+57 300"), DataError);
  CHECK_THROWS_AS(parse_phone("+12345"), DataError);
}

TEST_CASE("country tables must be prefix-free") {
  CHECK_THROWS_AS(CountryTable::parse("57,CO\n573,OTHER\n"), DataError);
  CHECK_THROWS_AS(CountryTable::parse("57\n"), DataError);
  auto t = CountryTable::parse("# comment\n57,CO\n58,VE\n");
  CHECK(t.size() == 2);
  CHECK(t.resolve("4915112345").country.tag == Country::Unknown);
  CHECK(CountryTable::builtin().size() > 20);
}

TEST_CASE("group uids come from icon links or title hashes") {
  CHECK(parse_uid_from_icon_url("https://pps.whatsapp.net/v/t61/x.jpg?oe=1&u=573001234567-1580000123%40g.us&x=1") ==
        "573001234567-1580000123");
  CHECK(parse_uid_from_icon_url("https://example.org/p.jpg?u=XXXX-1234@g.us") == "XXXX-1234");
  CHECK_FALSE(parse_uid_from_icon_url("https://example.org/p.jpg?v=1"));
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(derive_uid(std::string("57-1"), "title") == "57-1");
  CHECK(derive_uid(std::nullopt, "abc") == sha256_hex("abc"));
  CHECK_THROWS_AS(derive_uid(std::nullopt, ""), DataError);
}

TEST_CASE("message kinds and content identity") {
  for (auto k : {MessageKind::Text, MessageKind::Image, MessageKind::Video, MessageKind::Audio, MessageKind::Other}) {
    CHECK(parse_message_kind(to_string(k)) == k);
  }
  CHECK_FALSE(parse_message_kind("sticker"));
  auto m = text_message("1", "g", "+573001234567", "2020-03-01T10:00Z", "hola");
  CHECK(content_identity(m) == "hola");
  m.kind = MessageKind::Image;
  m.media_hash = "abc";
  CHECK(content_identity(m) == "abc");
  m.media_hash.reset();
  CHECK_FALSE(content_identity(m));
}

TEST_CASE("corpus derives membership and lookups") {
  auto c = chatlens::testing::corpus_of({
      text_message("1", "g1", "+573001234567", "2020-03-01T10:00Z", "a"),
      text_message("2", "g1", "+584121234567", "2020-03-01T10:01Z", "b"),
      text_message("3", "g2", "+573001234567", "2020-03-01T10:02Z", "c"),
  });
  CHECK(c.groups().size() == 2);
  CHECK(c.group_members("g1").size() == 2);
  CHECK(c.group_message_indices("g2").size() == 1);
  CHECK(c.users().size() == 2);
  CHECK(c.index_of("3") == 2u);
  CHECK(c.find("4") == nullptr);
}

TEST_CASE("corpus rejects dangling group references") {
  std::map<std::string, Group> groups;
  std::vector<Message> msgs{text_message("1", "missing", "+573001234567", "2020-03-01T10:00Z", "a")};
  CHECK_THROWS_AS(Corpus(groups, msgs), DataError);
  groups["g"] = Group{"g", "t", std::nullopt, {"g"}};
  CHECK_THROWS_AS(Corpus(groups, {}), DataError);
}
