#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "chatlens/error.hpp"
#include "chatlens/ingest.hpp"
#include "chatlens/synth.hpp"
#include "oracles.hpp"
#include "synth_support.hpp"

using namespace chatlens;
using chatlens::testing::read_generated;

namespace {

std::vector<std::string> words_of(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

}  // namespace

TEST_CASE("rng helpers") {
  synth::Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    CHECK(rng.below(7) < 7);
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK_THROWS_AS(rng.below(0), ArgumentError);
  for (int i = 0; i < 200; ++i) CHECK(rng.weighted({0.0, 3.0, 0.0}) == 1);
  double sum = 0;
  for (int i = 0; i < 4000; ++i) sum += static_cast<double>(rng.poisson(3.5));
  CHECK(sum / 4000 == doctest::Approx(3.5).epsilon(0.05));
  CHECK(rng.poisson(0.0) == 0);

  synth::Rng a(99), b(99);
  for (int i = 0; i < 50; ++i) CHECK(a.next() == b.next());
}

TEST_CASE("generation is deterministic per seed") {
  const auto cfg = synth::GenConfig::small(7);
  const auto first = synth::generate(cfg);
  const auto second = synth::generate(cfg);
  CHECK(first.logs == second.logs);
  CHECK(synth::ground_truth_json(first, cfg) == synth::ground_truth_json(second, cfg));
  const auto other = synth::generate(synth::GenConfig::small(8));
  CHECK(other.logs != first.logs);
}

TEST_CASE("generated logs ingest back to the true messages") {
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    CAPTURE(seed);
    const auto g = synth::generate(synth::GenConfig::small(seed));
    const auto read = read_generated(g);
    CHECK(read.rejects.empty());
    CHECK(read.records.size() == g.truth.emitted_records);
    const auto deduped = ingest::dedup(read.records);
    const auto got = oracle::key_counts(deduped.corpus.messages());
    CHECK(got == chatlens::testing::expected_premerge_keys(g.truth));
    CHECK(got == oracle::dedup_key_counts(chatlens::testing::messages_of(read.records)));

    const auto [merged, report] = ingest::resolve_group_variants(deduped.corpus);
    CHECK(oracle::key_counts(merged.messages()) == chatlens::testing::expected_merged_keys(g.truth));
    std::set<std::string> uids;
    for (const auto& r : read.records) uids.insert(r.message.group_uid);
    const auto score = chatlens::testing::score_renames(g.truth, report, uids);
    CHECK(score.found == score.expected);
    CHECK(score.false_merges == 0);
  }
}

TEST_CASE("server B reports groups through icon links") {
  const auto g = synth::generate(synth::GenConfig::small(3));
  REQUIRE(g.logs.count("B"));
  bool saw_link = false;
  for (const auto& line : g.logs.at("B")) {
    if (line.find("pps.whatsapp.net") != std::string::npos) {
      saw_link = true;
      CHECK(line.find("\"group_uid\":null") != std::string::npos);
    }
  }
  CHECK(saw_link);
}

TEST_CASE("planted variants differ from their template by at most the mutation rate") {
  auto cfg = synth::GenConfig::small(11);
  cfg.mutation_rate = 2;
  cfg.variants_per_template = 4;
  const auto g = synth::generate(cfg);
  CHECK(g.labeled.items().size() == cfg.n_scam_templates + cfg.n_fake_templates);
  CHECK(g.truth.planted.size() == cfg.instances_per_template * g.labeled.items().size());
  for (const auto& p : g.truth.planted) {
    const auto a = words_of(p.text), b = words_of(p.template_text);
    REQUIRE(a.size() == b.size());
    std::size_t diff = 0;
    for (std::size_t i = 0; i < a.size(); ++i) diff += a[i] != b[i];
    if (p.variant_id == 0) {
      CHECK(diff == 0);
    } else {
      CHECK(diff == cfg.mutation_rate);
    }
    const auto* item = g.labeled.find_text(p.template_text);
    REQUIRE(item);
    CHECK(item->label == p.label);
  }
}

TEST_CASE("ground truth invariants") {
  const auto g = synth::generate(synth::GenConfig::small(21));
  const auto& t = g.truth;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < t.messages.size(); ++i) {
    CHECK(ids.insert(t.messages[i].message.id).second);
    if (i) CHECK(t.messages[i - 1].message.sent_time <= t.messages[i].message.sent_time);
  }
  for (const auto& id : t.missing_parent_replies) {
    bool found = false;
    for (const auto& tm : t.messages) {
      if (tm.message.id == id) {
        found = true;
        REQUIRE(tm.message.reply_to);
        CHECK(!ids.count(*tm.message.reply_to));
      }
    }
    CHECK(found);
  }
  for (const auto& set : t.true_duplicate_sets) CHECK(set.size() >= 2);
  REQUIRE(t.renames.size() == 1);
  CHECK(t.renames[0].old_uid != t.renames[0].new_uid);
  CHECK(t.emitted_records >= t.messages.size());
}

TEST_CASE("config JSON round trip and validation") {
  auto cfg = synth::GenConfig::small(5);
  cfg.keyword = "bus";
  const auto back = synth::GenConfig::from_json_text(cfg.to_json_text());
  CHECK(back.to_json_text() == cfg.to_json_text());
  CHECK(back.keyword == "bus");
  CHECK(back.n_groups == 6);

  CHECK_THROWS_AS(synth::GenConfig::from_json_text(R"({"n_grups": 3})"), DataError);
  CHECK_THROWS_AS(synth::GenConfig::from_json_text(R"({"n_groups": "three"})"), DataError);
  CHECK_THROWS_AS(synth::GenConfig::from_json_text("[1]"), DataError);
  CHECK_THROWS_AS(synth::GenConfig::from_json_text(R"({"forward_rate": 1.5})"), ArgumentError);

  synth::GenConfig bad;
  bad.p_image = 0.6;
  bad.p_video = 0.6;
  CHECK_THROWS_AS(bad.validate(), ArgumentError);
  bad = {};
  bad.max_group_size = 2;
  CHECK_THROWS_AS(bad.validate(), ArgumentError);
  bad = {};
  bad.mutation_rate = 12;
  CHECK_THROWS_AS(bad.validate(), ArgumentError);
  bad = {};
  bad.start_date = "20-02-2020";
  CHECK_THROWS_AS(synth::generate(bad), ArgumentError);
}

TEST_CASE("write_generated lays out the output directory") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "chatlens_synth_layout";
  fs::remove_all(dir);
  const auto cfg = synth::GenConfig::small(2);
  const auto g = synth::generate(cfg);
  synth::write_generated(g, cfg, dir.string());
  for (const char* name : {"logs/server_A.jsonl", "logs/server_B.jsonl", "ground_truth.json",
                           "labeled_corpus.jsonl", "truth_labels.csv", "config.json"}) {
    CHECK(fs::exists(dir / name));
  }
  std::ifstream labels(dir / "truth_labels.csv");
  std::string header;
  std::getline(labels, header);
  CHECK(header == "message_id,label,template_id,variant_id");
  CHECK(misinfo::LabeledCorpus::load((dir / "labeled_corpus.jsonl").string()).items().size() == 3);
  fs::remove_all(dir);
}
