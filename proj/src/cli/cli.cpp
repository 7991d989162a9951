#include "chatlens/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "chatlens/error.hpp"
#include "chatlens/ingest.hpp"
#include "common.hpp"

namespace chatlens::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TzOffset parse_tz(std::string_view text) {
  if (text == "UTC" || text == "Z") return TzOffset{0};
  const auto bad = [&] { return ArgumentError("invalid --tz-offset '" + std::string(text) + "'"); };
  if (text.empty()) throw bad();
  int sign = 1;
  std::string_view rest = text;
  if (rest[0] == '+' || rest[0] == '-') {
    sign = rest[0] == '-' ? -1 : 1;
    rest.remove_prefix(1);
  }
  std::string digits;
  bool colon = false;
  for (char c : rest) {
    if (c == ':') {
      if (colon) throw bad();
      colon = true;
    } else if (c >= '0' && c <= '9') {
      digits.push_back(c);
    } else {
      throw bad();
    }
  }
  if (digits.empty()) throw bad();
  int minutes = 0;
  if (colon || digits.size() == 4) {
    if (digits.size() != 4) throw bad();
    minutes = std::stoi(digits.substr(0, 2)) * 60 + std::stoi(digits.substr(2));
  } else {
    if (digits.size() > 4) throw bad();
    minutes = std::stoi(digits);
  }
  if (minutes > 14 * 60) throw bad();
  return TzOffset{sign * minutes};
}

trends::Period parse_period(std::string_view text) {
  const auto sep = text.find(':');
  const auto bad = [&] { return ArgumentError("invalid period '" + std::string(text) + "', expected FROM:TO"); };
  if (sep == std::string_view::npos) throw bad();
  auto from = parse_date(text.substr(0, sep));
  auto to = parse_date(text.substr(sep + 1));
  if (!from || !to) throw bad();
  if (*from > *to) throw ArgumentError("period '" + std::string(text) + "' ends before it starts");
  return {*from, *to};
}

RunConfig RunConfig::from_json_text(std::string_view text, const std::string& origin) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(origin + ": not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw DataError(origin + ": expected a JSON object");
  RunConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "tz_offset") {
        c.tz_offset_minutes = value.is_string() ? parse_tz(value.get<std::string>()).minutes : value.get<int>();
      } else if (key == "candidate_threshold") {
        c.candidate_threshold = value.get<double>();
      } else if (key == "variant_threshold") {
        c.variant_threshold = value.get<double>();
      } else if (key == "merge_min_cosine") {
        c.merge_min_cosine = value.get<double>();
      } else if (key == "merge_min_identical") {
        c.merge_min_identical = value.get<double>();
      } else if (key == "min_tokens") {
        c.min_tokens = value.get<std::size_t>();
      } else if (key == "keywords") {
        c.keywords = value.get<std::vector<std::string>>();
      } else if (key == "periods") {
        for (const auto& [name, p] : value.items()) c.periods.emplace_back(name, parse_period(p.get<std::string>()));
      } else if (key == "classifier") {
        c.classifier = value;
      } else {
        throw DataError(origin + ": unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(origin + ": " + e.what());
  } catch (const ArgumentError& e) {
    throw DataError(origin + ": " + e.what());
  }
  c.validate();
  return c;
}

void RunConfig::validate() const {
  for (double t : {candidate_threshold, variant_threshold, merge_min_cosine, merge_min_identical}) {
    if (!(t >= 0 && t <= 1)) throw ArgumentError("thresholds must lie in [0, 1]");
  }
}

const RunConfig& Context::config() {
  if (!config_) {
    config_ = opts.config.empty() ? RunConfig{} : RunConfig::from_json_text(read_text_file(opts.config), opts.config);
  }
  return *config_;
}

TzOffset Context::tz() {
  if (!opts.tz.empty()) return parse_tz(opts.tz);
  if (auto m = config().tz_offset_minutes) return TzOffset{*m};
  return kDefaultTz;
}

std::string Context::require_out() const {
  if (opts.out.empty()) throw ArgumentError("--out is required");
  return opts.out;
}

std::string Context::single_input(const char* what) const {
  if (opts.inputs.size() != 1) throw ArgumentError(std::string("--input takes exactly one ") + what);
  return opts.inputs.front();
}

Corpus Context::load_corpus() const {
  const fs::path dir = single_input("corpus directory");
  return ingest::read_corpus((dir / "corpus.jsonl").string(), (dir / "groups.jsonl").string());
}

std::ofstream Context::open_output(const std::string& name) const {
  const fs::path dir = require_out();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw DataError("cannot write " + (dir / name).string());
  return out;
}

void Context::summary(const std::string& command, const std::vector<ordered_json>& records) const {
  auto out = open_output("summary.jsonl");
  if (!opts.no_header) {
    const auto now = std::chrono::duration_cast<std::chrono::seconds>(
        std::chrono::system_clock::now().time_since_epoch());
    ordered_json h;
    h["tool"] = "chatlens";
    h["command"] = command;
    h["generated_at"] = format_iso8601(Timestamp{now.count()}, TzOffset{0});
    out << h.dump() << '\n';
  }
  for (const auto& r : records) out << r.dump() << '\n';
}

int run(int argc, char** argv) {
  CLI::App app{"Analysis toolkit for group chat message logs"};
  app.require_subcommand(1);
  app.fallthrough();
  Context ctx;
  app.add_option("--input", ctx.opts.inputs, "Input files or directory");
  app.add_option("--out", ctx.opts.out, "Output directory");
  app.add_option("--tz-offset", ctx.opts.tz, "Local offset such as -05:00 (default -05:00)");
  app.add_option("--seed", ctx.opts.seed, "Seed for randomized steps");
  app.add_option("--config", ctx.opts.config, "JSON settings file");
  app.add_flag("--no-header", ctx.opts.no_header, "Omit the timestamped header of summary.jsonl");

  Action action;
  register_ingest(app, ctx, action);
  register_analysis(app, ctx, action);
  register_text(app, ctx, action);
  register_misc(app, ctx, action);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  try {
    if (!action) throw ArgumentError("no command selected; see --help");
    action();
  } catch (const ArgumentError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace chatlens::cli
