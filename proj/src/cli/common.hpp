#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chatlens/corpus.hpp"
#include "chatlens/trends.hpp"

namespace chatlens::cli {

/// Settings file passed with --config. Flags given on the command line win.
struct RunConfig {
  std::optional<int> tz_offset_minutes;
  double candidate_threshold = 0.3;
  double variant_threshold = 0.8;
  double merge_min_cosine = 0.5;
  double merge_min_identical = 0.6;
  std::size_t min_tokens = 5;
  std::vector<std::string> keywords;
  std::vector<std::pair<std::string, trends::Period>> periods;
  std::optional<nlohmann::json> classifier;  // run spec object

  static RunConfig from_json_text(std::string_view text, const std::string& origin);
  void validate() const;
};

/// Flags shared by every subcommand.
struct GlobalOptions {
  std::vector<std::string> inputs;
  std::string out;
  std::string tz;
  std::optional<std::uint64_t> seed;
  std::string config;
  bool no_header = false;
};

class Context {
 public:
  GlobalOptions opts;

  /// Loaded lazily from --config; defaults when no file was given.
  const RunConfig& config();
  TzOffset tz();

  std::string require_out() const;
  std::string single_input(const char* what) const;
  /// Reads corpus.jsonl and groups.jsonl from the --input directory.
  Corpus load_corpus() const;
  std::ofstream open_output(const std::string& name) const;

  /// summary.jsonl: an optional header line, then one record per call.
  void summary(const std::string& command, const std::vector<nlohmann::ordered_json>& records) const;

 private:
  std::optional<RunConfig> config_;
};

/// Parses "-05:00", "+0530", "UTC" or a signed minute count.
TzOffset parse_tz(std::string_view text);
trends::Period parse_period(std::string_view text);
std::string read_text_file(const std::string& path);

using Action = std::function<void()>;

void register_ingest(CLI::App& app, Context& ctx, Action& action);
void register_analysis(CLI::App& app, Context& ctx, Action& action);
void register_text(CLI::App& app, Context& ctx, Action& action);
void register_misc(CLI::App& app, Context& ctx, Action& action);

}  // namespace chatlens::cli
