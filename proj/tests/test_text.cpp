#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <string>

#include "chatlens/csv.hpp"
#include "chatlens/stemmer.hpp"
#include "chatlens/text.hpp"

using namespace chatlens;
using doctest::Approx;

TEST_CASE("stemmer anchors") {
  CHECK(text::stem_spanish("chico") == "chic");
  CHECK(text::stem_spanish("chica") == "chic");
  CHECK(text::stem_spanish("chicago") == "chicag");
  CHECK(text::stem_spanish("trochas") == "troch");
  CHECK(text::stem_spanish("trocha") == "troch");
}

TEST_CASE("stemmer matches the full Snowball Spanish vocabulary") {
  const auto table = csv::read_file(std::string(CHATLENS_TEST_DATA) + "/snowball_spanish_vocabulary.csv");
  const auto wc = table.column("word");
  const auto sc = table.column("stem");
  REQUIRE(table.rows.size() == 28390);
  std::size_t failures = 0;
  for (const auto& row : table.rows) {
    if (text::stem_spanish(row[wc]) != row[sc]) {
      if (++failures <= 10) MESSAGE(row[wc] << " -> " << text::stem_spanish(row[wc]) << ", expected " << row[sc]);
    }
  }
  CHECK(failures == 0);
}

TEST_CASE("utf8 helpers") {
  CHECK(text::utf8_length("año 😀") == 5);
  CHECK(text::utf8_encode(text::utf8_decode("Ñandú")) == "Ñandú");
  CHECK(text::utf8_decode("\xff") == std::u32string(1, U'�'));
  CHECK(text::to_lower(U'Ñ') == U'ñ');
  CHECK(text::contains_emoji("hola 😂"));
  CHECK_FALSE(text::contains_emoji("hola :)"));
  CHECK(text::word_count("  hola   a todos\n") == 3);
  CHECK(text::word_count("") == 0);
}

TEST_CASE("tokenizer lowercases, splits on punctuation, drops stopwords and stems") {
  const auto tokens = text::tokenize("¡Hola! Los CHICOS de Cúcuta, pasaron por las trochas...😀");
  CHECK(tokens == text::TokenList{"hol", "chic", "cucut", "pas", "troch"});
  CHECK(text::tokenize("de la que el en").empty());
  CHECK(text::Tokenizer::spanish().is_stopword("porque"));
}

TEST_CASE("custom stopword lists") {
  auto words = text::parse_stopwords("# comment\nfoo\n\n bar \n");
  CHECK(words.size() == 2);
  text::Tokenizer t(words);
  CHECK(t.tokenize("foo de bar") == text::TokenList{"de"});
}

TEST_CASE("tf-idf weights are count times ln(N/df)") {
  const std::vector<text::TokenList> docs{{"a", "b", "b"}, {"b", "c"}, {"c", "d"}};
  auto idx = text::TfidfIndex::build(docs);
  CHECK(idx.size() == 4);
  CHECK(idx.doc_count() == 3);
  const auto b = *idx.dimension("b");
  CHECK(idx.doc_freq(b) == 2);
  CHECK(idx.idf(b) == Approx(std::log(1.5)));
  auto v = idx.vectorize({"b", "b", "a", "zzz"});
  CHECK(v.at(b) == Approx(2 * std::log(1.5)));
  CHECK(v.at(*idx.dimension("a")) == Approx(std::log(3.0)));
  CHECK(v.entries.size() == 2);
  CHECK(std::is_sorted(v.entries.begin(), v.entries.end()));
}

TEST_CASE("terms in every document vanish") {
  const std::vector<text::TokenList> docs{{"a", "x"}, {"a", "y"}};
  auto idx = text::TfidfIndex::build(docs);
  CHECK(idx.vectorize({"a"}).empty());
}

TEST_CASE("cosine similarity properties") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> w(0.1, 3);
  for (int trial = 0; trial < 100; ++trial) {
    text::SparseVector u, v;
    for (std::uint32_t d = 0; d < 12; ++d) {
      if (rng() % 2) u.entries.emplace_back(d, w(rng));
      if (rng() % 2) v.entries.emplace_back(d, w(rng));
    }
    const double c = text::cosine(u, v);
    CHECK(c >= 0);
    CHECK(c <= 1 + 1e-12);
    CHECK(c == Approx(text::cosine(v, u)));
    if (!u.empty()) CHECK(text::cosine(u, u) == Approx(1.0));
  }
  CHECK(text::cosine({}, {}) == 0);
}
