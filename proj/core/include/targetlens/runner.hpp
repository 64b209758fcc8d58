#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "targetlens/corpus.hpp"
#include "targetlens/prompt.hpp"
#include "targetlens/provider.hpp"

namespace targetlens {

enum class ParseStatus { kParsed, kUnparsed };

// Model output for one (ad, task). Parsed iff predicted_label is set and
// belongs to the task's label set; make_prediction enforces this.
struct PredictionRecord {
  std::string ad_id;
  Task task = Task::kGender;
  std::optional<std::string> predicted_label;
  std::string explanation;
  std::string raw_response;
  std::string provider;
  ParseStatus parse_status = ParseStatus::kUnparsed;

  bool parsed() const noexcept { return parse_status == ParseStatus::kParsed; }
  bool operator==(const PredictionRecord&) const = default;
};

PredictionRecord make_prediction(std::string ad_id, Task task, const LabelParse& parse,
                                 std::string raw_response, std::string provider,
                                 const std::vector<std::string>& label_keys);

nlohmann::ordered_json to_json(const PredictionRecord& record);
PredictionRecord prediction_from_json(const nlohmann::json& j);

void write_predictions(std::ostream& out, std::span<const PredictionRecord> records);
std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path);

struct RunManifest {
  std::string corpus_digest;
  std::vector<Task> tasks;
  std::string provider;
  std::string model;
  std::string prompt_version;
  std::size_t concurrency = 1;
  std::string started_at;
  std::string finished_at;
  std::size_t records = 0;
  std::size_t skipped_unlabeled = 0;
  std::size_t unparsed = 0;

  bool operator==(const RunManifest&) const = default;
};

nlohmann::ordered_json to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const nlohmann::json& j);

struct RunOptions {
  std::vector<Task> tasks = {Task::kGender, Task::kAge};
  std::string model;
  std::size_t concurrency = 1;
  TextAssembly text;
  // ISO 8601 timestamps for the manifest; UTC wall clock when unset.
  std::function<std::string()> clock;
};

struct RunResult {
  std::vector<PredictionRecord> records;  // sorted by (task, ad_id)
  RunManifest manifest;
};

// One record per (ad with a ground-truth label for the task, task). Ads
// without a label for a task are skipped and counted. Provider failures on
// single ads become Unparsed records that carry the error text. Throws
// ConfigError before any call when `provider` is null or options are invalid.
RunResult run_predictions(std::span<const LabeledAd> ads, const RunOptions& options,
                          Provider* provider, const PromptSet& prompts);

}  // namespace targetlens
