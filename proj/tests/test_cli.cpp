#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "chatlens/synth.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "chatlens_cli_test";

int tool(const std::string& args) {
  const std::string cmd = std::string(CHATLENS_TOOL) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string path(const char* name) { return (kWork / name).string(); }

// Generates and ingests a small corpus once for the whole file.
const fs::path& prepared() {
  static const bool ready = [] {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
    std::ofstream(kWork / "small.json") << chatlens::synth::GenConfig::small(3).to_json_text();
    return tool("synth --config " + path("small.json") + " --out " + path("gen")) == 0 &&
           tool("ingest --input " + path("gen/logs") + " --out " + path("corpus")) == 0;
  }();
  REQUIRE(ready);
  return kWork;
}

}  // namespace

TEST_CASE("synth and ingest produce a corpus") {
  const auto& dir = prepared();
  CHECK(fs::exists(dir / "gen/ground_truth.json"));
  CHECK(fs::exists(dir / "corpus/corpus.jsonl"));
  CHECK(fs::exists(dir / "corpus/groups.jsonl"));
  CHECK(slurp(dir / "corpus/dedup_report.csv").rfind("group_uid,", 0) == 0);
  CHECK(slurp(dir / "corpus/summary.jsonl").find("\"tool\":\"chatlens\"") != std::string::npos);
}

TEST_CASE("analysis commands write their tables") {
  prepared();
  const std::string in = " --input " + path("corpus");
  CHECK(tool("metrics" + in + " --out " + path("metrics")) == 0);
  for (const char* f : {"membership.csv", "co_membership.csv", "activity.csv", "length_stats.csv"}) {
    CHECK(fs::exists(kWork / "metrics" / f));
  }
  CHECK(tool("graph" + in + " --out " + path("graph")) == 0);
  CHECK(fs::exists(kWork / "graph/user_nodes.csv"));
  CHECK(tool("cascades" + in + " --out " + path("cascades")) == 0);
  CHECK(fs::exists(kWork / "cascades/cascades.csv"));
  CHECK(tool("trends" + in + " --out " + path("trends")) == 0);
  CHECK(fs::exists(kWork / "trends/keyword_share_message.csv"));
  CHECK(tool("misinfo score" + in + " --labeled " + path("gen/labeled_corpus.jsonl") + " --out " + path("mis")) == 0);
  CHECK(tool("misinfo merge" + in + " --labels " + path("mis/exact_labels.csv") + " --out " + path("mis")) == 0);
  CHECK(fs::exists(kWork / "mis/clusters.csv"));
  CHECK(tool("misinfo prevalence" + in + " --labels " + path("mis/exact_labels.csv") + " --out " + path("mis")) == 0);
  CHECK(fs::exists(kWork / "mis/group_prevalence.csv"));
}

TEST_CASE("malformed input exits 2 with a rejects report") {
  prepared();
  fs::create_directories(kWork / "bad");
  {
    std::ifstream good(kWork / "gen/logs/server_A.jsonl");
    std::string first;
    std::getline(good, first);
    std::ofstream(kWork / "bad/log.jsonl") << first << "\n{\"id\": 5\n";
  }
  CHECK(tool("ingest --input " + path("bad/log.jsonl") + " --out " + path("bad_out")) == 2);
  const std::string rejects = slurp(kWork / "bad_out/rejects.csv");
  CHECK(rejects.find("log.jsonl") != std::string::npos);
  CHECK(rejects.find("\n2,") != std::string::npos);
  CHECK(tool("ingest --input " + path("missing.jsonl") + " --out " + path("bad_out2")) == 2);
}

TEST_CASE("usage errors exit 1") {
  CHECK(tool("") == 1);
  CHECK(tool("frobnicate") == 1);
  CHECK(tool("ingest --out") == 1);
  CHECK(tool("ingest --out " + path("x")) == 1);
  CHECK(tool("stats ttest --input nothing.csv") == 1);
  CHECK(tool("trends --input " + path("corpus") + " --out " + path("t") + " --tz-offset 25:00") == 1);
  CHECK(tool("--help") == 0);
}

TEST_CASE("classify evaluate on injected predictions") {
  prepared();
  {
    std::ofstream out(kWork / "pred.csv");
    out << "predicted,actual\n";
    for (int i = 0; i < 103; ++i) out << "scam,scam\n";
    for (int i = 0; i < 11; ++i) out << "scam,not_scam\n";
    for (int i = 0; i < 49; ++i) out << "not_scam,scam\n";
    for (int i = 0; i < 200; ++i) out << "not_scam,not_scam\n";
  }
  CHECK(tool("classify evaluate --predictions " + path("pred.csv") + " --out " + path("eval")) == 0);
  const std::string eval = slurp(kWork / "eval/eval.csv");
  CHECK(eval.find("evaluate,,103,11,49,200,") != std::string::npos);
  CHECK(eval.find("0.677") != std::string::npos);
  {
    std::ofstream out(kWork / "pred_bad.csv");
    out << "predicted,actual\nscam,maybe\n";
  }
  CHECK(tool("classify evaluate --predictions " + path("pred_bad.csv") + " --out " + path("eval")) == 2);
}

TEST_CASE("stats commands read CSV tables") {
  fs::create_directories(kWork);
  {
    std::ofstream out(kWork / "xy.csv");
    out << "x,y,g\n";
    for (int i = 0; i < 10; ++i) out << i << ',' << 3 + 2 * i << ',' << (i % 2 ? "a" : "b") << '\n';
  }
  CHECK(tool("stats ols --formula 'y ~ x' --input " + path("xy.csv") + " --out " + path("st")) == 0);
  const std::string ols = slurp(kWork / "st/ols.csv");
  const auto at = ols.find("(intercept),");
  REQUIRE(at != std::string::npos);
  CHECK(std::stod(ols.substr(at + 12)) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(tool("stats ttest --column y --by g --input " + path("xy.csv") + " --out " + path("st")) == 0);
  CHECK(tool("stats pearson --x x --y y --input " + path("xy.csv") + " --out " + path("st")) == 0);
  CHECK(tool("stats anova --column y --by g --input " + path("xy.csv") + " --out " + path("st")) == 0);
  CHECK(tool("stats ols --formula 'y ~ nope' --input " + path("xy.csv") + " --out " + path("st")) == 2);
}

TEST_CASE("reruns with --no-header are byte-identical") {
  prepared();
  for (const char* run : {"r1", "r2"}) {
    REQUIRE(tool("ingest --no-header --input " + path("gen/logs") + " --out " + path(run)) == 0);
    REQUIRE(tool("cascades --no-header --input " + path(run) + " --out " + path(run)) == 0);
  }
  for (const char* f : {"corpus.jsonl", "groups.jsonl", "dedup_report.csv", "cascades.csv", "summary.jsonl"}) {
    CAPTURE(f);
    CHECK(slurp(kWork / "r1" / f) == slurp(kWork / "r2" / f));
    CHECK(!slurp(kWork / "r1" / f).empty());
  }
}
