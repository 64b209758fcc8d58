#include "targetlens/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <thread>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "targetlens/error.hpp"

namespace targetlens {

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(now));
}

struct Job {
  const LabeledAd* ad;
  Task task;
};

}  // namespace

PredictionRecord make_prediction(std::string ad_id, Task task, const LabelParse& parse,
                                 std::string raw_response, std::string provider,
                                 const std::vector<std::string>& label_keys) {
  PredictionRecord record;
  record.ad_id = std::move(ad_id);
  record.task = task;
  record.explanation = parse.explanation;
  record.raw_response = std::move(raw_response);
  record.provider = std::move(provider);
  if (parse.label &&
      std::find(label_keys.begin(), label_keys.end(), *parse.label) != label_keys.end()) {
    record.predicted_label = parse.label;
    record.parse_status = ParseStatus::kParsed;
  }
  return record;
}

nlohmann::ordered_json to_json(const PredictionRecord& record) {
  nlohmann::ordered_json j;
  j["ad_id"] = record.ad_id;
  j["task"] = key(record.task);
  j["predicted_label"] =
      record.predicted_label ? nlohmann::ordered_json(*record.predicted_label) : nlohmann::ordered_json(nullptr);
  j["explanation"] = record.explanation;
  j["raw_response"] = record.raw_response;
  j["provider"] = record.provider;
  j["parse_status"] = record.parsed() ? "parsed" : "unparsed";
  return j;
}

PredictionRecord prediction_from_json(const nlohmann::json& j) {
  PredictionRecord record;
  record.ad_id = j.at("ad_id").get<std::string>();
  auto task = parse_task(j.at("task").get<std::string>());
  if (!task || *task == Task::kTheme) throw SchemaError("prediction record has an invalid task");
  record.task = *task;
  if (const auto& label = j.at("predicted_label"); !label.is_null()) {
    record.predicted_label = label.get<std::string>();
  }
  record.explanation = j.at("explanation").get<std::string>();
  record.raw_response = j.at("raw_response").get<std::string>();
  record.provider = j.at("provider").get<std::string>();
  const auto status = j.at("parse_status").get<std::string>();
  if (status != "parsed" && status != "unparsed") {
    throw SchemaError(fmt::format("unknown parse_status '{}'", status));
  }
  record.parse_status = status == "parsed" ? ParseStatus::kParsed : ParseStatus::kUnparsed;
  if (record.parsed() != record.predicted_label.has_value()) {
    throw SchemaError(fmt::format("record {} has inconsistent parse_status", record.ad_id));
  }
  return record;
}

void write_predictions(std::ostream& out, std::span<const PredictionRecord> records) {
  for (const auto& r : records) out << to_json(r).dump() << '\n';
}

std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot open predictions '{}'", path.string()));
  std::vector<PredictionRecord> out;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++row;
    try {
      out.push_back(prediction_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw ParseError(row, "<record>", e.what());
    }
  }
  return out;
}

nlohmann::ordered_json to_json(const RunManifest& m) {
  nlohmann::ordered_json tasks = nlohmann::ordered_json::array();
  for (Task t : m.tasks) tasks.push_back(key(t));
  return {{"corpus_digest", m.corpus_digest},
          {"tasks", tasks},
          {"provider", m.provider},
          {"model", m.model},
          {"prompt_version", m.prompt_version},
          {"concurrency", m.concurrency},
          {"started_at", m.started_at},
          {"finished_at", m.finished_at},
          {"records", m.records},
          {"skipped_unlabeled", m.skipped_unlabeled},
          {"unparsed", m.unparsed}};
}

RunManifest manifest_from_json(const nlohmann::json& j) {
  RunManifest m;
  m.corpus_digest = j.at("corpus_digest").get<std::string>();
  for (const auto& t : j.at("tasks")) {
    auto task = parse_task(t.get<std::string>());
    if (!task) throw SchemaError("manifest lists an unknown task");
    m.tasks.push_back(*task);
  }
  m.provider = j.at("provider").get<std::string>();
  m.model = j.at("model").get<std::string>();
  m.prompt_version = j.at("prompt_version").get<std::string>();
  m.concurrency = j.at("concurrency").get<std::size_t>();
  m.started_at = j.value("started_at", std::string());
  m.finished_at = j.value("finished_at", std::string());
  m.records = j.value("records", std::size_t{0});
  m.skipped_unlabeled = j.value("skipped_unlabeled", std::size_t{0});
  m.unparsed = j.value("unparsed", std::size_t{0});
  return m;
}

RunResult run_predictions(std::span<const LabeledAd> ads, const RunOptions& options,
                          Provider* provider, const PromptSet& prompts) {
  if (provider == nullptr) throw ConfigError("no completion provider configured");
  if (options.tasks.empty()) throw ConfigError("at least one prediction task is required");
  if (options.concurrency < 1) throw ConfigError("concurrency cap must be >= 1");
  for (Task t : options.tasks) {
    if (t == Task::kTheme) throw ConfigError("theme synthesis is not a prediction task");
  }
  auto clock = options.clock ? options.clock : utc_now;

  std::vector<Task> tasks = options.tasks;
  std::sort(tasks.begin(), tasks.end());
  tasks.erase(std::unique(tasks.begin(), tasks.end()), tasks.end());

  RunResult result;
  RunManifest& manifest = result.manifest;
  {
    std::vector<AdRecord> raw;
    raw.reserve(ads.size());
    for (const auto& ad : ads) raw.push_back(ad.ad);
    manifest.corpus_digest = corpus_digest(raw);
  }
  manifest.tasks = tasks;
  manifest.provider = provider->name();
  manifest.model = options.model;
  manifest.prompt_version = prompts.version();
  manifest.concurrency = options.concurrency;
  manifest.started_at = clock();

  std::vector<Job> jobs;
  for (Task task : tasks) {
    for (const auto& ad : ads) {
      if (ad.target_key(task)) {
        jobs.push_back({&ad, task});
      } else {
        ++manifest.skipped_unlabeled;
      }
    }
  }
  if (manifest.skipped_unlabeled > 0) {
    spdlog::info("skipped {} (ad, task) pairs without a ground-truth label",
                 manifest.skipped_unlabeled);
  }

  std::vector<PredictionRecord> records(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& job = jobs[i];
      const PromptSpec& spec = prompts.for_task(job.task);
      try {
        CompletionRequest request{options.model,
                                  render_prompt(spec, ad_text(job.ad->ad, options.text)), {}};
        CompletionResponse response = provider->complete(request);
        records[i] = make_prediction(job.ad->ad.ad_id, job.task,
                                     parse_label_response(response.text, spec.label_set()),
                                     response.text, response.provider, spec.label_keys());
      } catch (const std::exception& e) {
        PredictionRecord failed;
        failed.ad_id = job.ad->ad.ad_id;
        failed.task = job.task;
        failed.explanation = fmt::format("provider error: {}", e.what());
        failed.provider = provider->name();
        failed.parse_status = ParseStatus::kUnparsed;
        records[i] = std::move(failed);
      }
    }
  };

  const std::size_t workers = std::min(options.concurrency, std::max<std::size_t>(jobs.size(), 1));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    return std::tie(a.task, a.ad_id) < std::tie(b.task, b.ad_id);
  });
  manifest.records = records.size();
  manifest.unparsed = static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const auto& r) { return !r.parsed(); }));
  if (manifest.unparsed > 0) {
    spdlog::warn("{} of {} predictions could not be parsed; they are excluded from metrics "
                 "unless strict mode is on",
                 manifest.unparsed, records.size());
  }
  manifest.finished_at = clock();
  result.records = std::move(records);
  return result;
}

}  // namespace targetlens
