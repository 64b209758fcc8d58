#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "targetlens/corpus.hpp"
#include "targetlens/evaluator.hpp"
#include "targetlens/fairness.hpp"
#include "targetlens/lexical.hpp"
#include "targetlens/prompt.hpp"
#include "targetlens/provider.hpp"
#include "targetlens/runner.hpp"
#include "targetlens/thematics.hpp"

namespace targetlens {

enum class ProviderMode { kLive, kReplay, kMock };

std::string_view key(ProviderMode mode) noexcept;
std::optional<ProviderMode> parse_provider_mode(std::string_view text);

struct AuditConfig {
  std::filesystem::path input;
  CorpusFormat format = CorpusFormat::kJsonl;
  ProviderMode provider = ProviderMode::kReplay;
  std::string model = "o1-preview";
  // Required in replay mode. In live mode, responses are recorded here when set.
  std::filesystem::path replay_store;
  std::filesystem::path mock_rules;  // required in mock mode
  std::filesystem::path prompts_dir;  // built-in prompts when empty
  std::filesystem::path reference_values;  // optional
  std::filesystem::path stopwords;  // optional
  std::vector<Task> tasks = {Task::kGender, Task::kAge};
  double threshold = kDefaultExclusivityThreshold;
  std::size_t concurrency = 1;
  LexicalOptions lexical;
  UnparsedPolicy unparsed = UnparsedPolicy::kExclude;
  bool themes = true;
  // Keep going after a failed stage and report what was skipped.
  bool partial = false;
  LiveProviderConfig live;
};

// Checks paths, modes and numeric ranges. Throws ConfigError (or
// ParameterError) without touching the corpus or the provider.
void validate_config(const AuditConfig& config);

std::shared_ptr<Provider> make_provider(const AuditConfig& config);
PromptSet load_prompts(const AuditConfig& config);

// Manifest fields that are reproducible across runs.
struct RunSummary {
  std::string corpus_digest;
  std::vector<Task> tasks;
  std::string provider;
  std::string model;
  std::string prompt_version;
  std::size_t records = 0;
  std::size_t skipped_unlabeled = 0;
  std::size_t unparsed = 0;

  bool operator==(const RunSummary&) const = default;
};

RunSummary summarize_run(const RunManifest& manifest);

struct TaskEvaluation {
  Task task = Task::kGender;
  ConfusionMatrix matrix;
  ClassificationReport report;

  bool operator==(const TaskEvaluation&) const = default;
};

inline constexpr std::size_t kExcerptLimit = 280;

struct LedgerEntry {
  std::string ad_id;
  Task task = Task::kGender;
  std::string truth;
  std::string prediction;
  std::string explanation;
  std::string excerpt;  // at most kExcerptLimit code points

  bool operator==(const LedgerEntry&) const = default;
};

// Parsed records whose prediction differs from the ground truth.
struct MisclassificationLedger {
  std::vector<LedgerEntry> entries;  // by (task, ad_id)

  std::vector<LedgerEntry> with_truth(std::string_view truth) const;
  bool operator==(const MisclassificationLedger&) const = default;
};

// Cuts at a code-point boundary, ending with "..." when shortened.
std::string excerpt(std::string_view text, std::size_t limit = kExcerptLimit);

MisclassificationLedger build_ledger(std::span<const PredictionRecord> records,
                                     std::span<const LabeledAd> ads,
                                     const TextAssembly& text = {});

struct SkippedSection {
  std::string section;
  std::string module;
  std::string stage;
  std::string reason;

  bool operator==(const SkippedSection&) const = default;
};

// Every section is optional so that a partial run can still be rendered.
struct AuditReport {
  std::optional<CorpusSummary> corpus;
  std::optional<RunSummary> run;
  std::optional<AccuracyBreakdown> accuracy;
  std::optional<std::vector<TaskEvaluation>> evaluations;
  std::optional<std::vector<FairnessReport>> fairness;
  std::optional<LexicalAnalysis> lexical;
  std::optional<std::vector<ThemeSet>> themes;
  std::optional<MisclassificationLedger> ledger;
  std::vector<SkippedSection> skipped;

  bool partial() const noexcept { return !skipped.empty(); }
  bool operator==(const AuditReport&) const = default;
};

// ---------------------------------------------------------------------------
// Stages. Each is usable on its own; run_audit chains them.

std::vector<LabeledAd> ingest(const AuditConfig& config);

struct Evaluation {
  AccuracyBreakdown accuracy;
  std::vector<TaskEvaluation> tasks;
  MisclassificationLedger ledger;
};

// Tasks without any record are left out. Warns when unparsed records are
// excluded from the figures.
Evaluation evaluate(std::span<const LabeledAd> ads, std::span<const PredictionRecord> records,
                    UnparsedPolicy policy = UnparsedPolicy::kExclude,
                    const TextAssembly& text = {});

std::vector<FairnessReport> assess_fairness(std::span<const TaskEvaluation> evaluations,
                                            std::span<const ReferenceValue> references = {});

// One synthesis per (task, group) with at least one correct explanation.
std::vector<ThemeSet> synthesize_all(std::span<const LabeledAd> ads,
                                     std::span<const PredictionRecord> records,
                                     std::span<const Task> tasks, Provider& provider,
                                     const PromptSpec& spec, const std::string& model);

// Intermediate products of run_audit, for callers that persist them.
struct AuditArtifacts {
  std::vector<LabeledAd> labeled;
  std::vector<PredictionRecord> records;
  std::optional<RunManifest> manifest;
};

// Module failures are rethrown as StageError naming module and stage unless
// config.partial is set, in which case the section and its dependents are
// recorded as skipped.
AuditReport run_audit(const AuditConfig& config, AuditArtifacts* artifacts = nullptr);

// ---------------------------------------------------------------------------
// Rendering.

enum class ReportFormat { kJson, kMarkdown };

std::optional<ReportFormat> parse_report_format(std::string_view text);

nlohmann::ordered_json report_to_json(const AuditReport& report);
AuditReport report_from_json(const nlohmann::json& j);

// JSON: full precision, stable key order, trailing newline.
// Markdown: 2-dp tables, "SKIPPED" placeholders for missing sections.
std::string render_report(const AuditReport& report, ReportFormat format);

std::string render_markdown(const AuditReport& report);

// Section renderers shared with the per-stage CLI commands.
std::string markdown_evaluation(std::span<const TaskEvaluation> evaluations);
std::string markdown_accuracy(const AccuracyBreakdown& accuracy);
std::string markdown_fairness(std::span<const FairnessReport> reports);
std::string markdown_lexical(const LexicalAnalysis& lexical);
std::string markdown_themes(std::span<const ThemeSet> themes);
std::string markdown_ledger(const MisclassificationLedger& ledger);

// JSON pieces, also used by the stage commands.
nlohmann::ordered_json to_json(const CorpusSummary& summary);
nlohmann::ordered_json to_json(const RunSummary& run);
nlohmann::ordered_json to_json(const AccuracyBreakdown& accuracy);
nlohmann::ordered_json to_json(const TaskEvaluation& evaluation);
nlohmann::ordered_json to_json(const FairnessReport& report);
nlohmann::ordered_json to_json(const LexicalAnalysis& lexical);
nlohmann::ordered_json to_json(const MisclassificationLedger& ledger);

AccuracyBreakdown accuracy_from_json(const nlohmann::json& j);
TaskEvaluation evaluation_from_json(const nlohmann::json& j);
FairnessReport fairness_from_json(const nlohmann::json& j);
LexicalAnalysis lexical_from_json(const nlohmann::json& j);
MisclassificationLedger ledger_from_json(const nlohmann::json& j);

}  // namespace targetlens
