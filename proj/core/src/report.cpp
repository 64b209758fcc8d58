#include "targetlens/report.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "targetlens/error.hpp"

namespace targetlens {

namespace fs = std::filesystem;

std::string_view key(ProviderMode mode) noexcept {
  switch (mode) {
    case ProviderMode::kLive:
      return "live";
    case ProviderMode::kReplay:
      return "replay";
    case ProviderMode::kMock:
      return "mock";
  }
  return "replay";
}

std::optional<ProviderMode> parse_provider_mode(std::string_view text) {
  if (text == "live") return ProviderMode::kLive;
  if (text == "replay") return ProviderMode::kReplay;
  if (text == "mock") return ProviderMode::kMock;
  return std::nullopt;
}

namespace {

void require_file(const fs::path& path, std::string_view what) {
  if (path.empty()) throw ConfigError(fmt::format("{} path is required", what));
  std::error_code ec;
  if (!fs::exists(path, ec)) {
    throw ConfigError(fmt::format("{} not found: {}", what, path.string()));
  }
}

}  // namespace

void validate_config(const AuditConfig& config) {
  require_file(config.input, "input corpus");
  switch (config.provider) {
    case ProviderMode::kReplay:
      require_file(config.replay_store, "replay store");
      break;
    case ProviderMode::kMock:
      require_file(config.mock_rules, "mock rules");
      break;
    case ProviderMode::kLive:
      break;
  }
  if (!config.prompts_dir.empty()) require_file(config.prompts_dir, "prompt directory");
  if (!config.reference_values.empty()) require_file(config.reference_values, "reference values");
  if (!config.stopwords.empty()) require_file(config.stopwords, "stopword list");

  if (config.tasks.empty()) throw ConfigError("at least one task is required");
  for (Task t : config.tasks) {
    if (t == Task::kTheme) throw ConfigError("'theme' is not a prediction task");
  }
  if (!(config.threshold > 0.5 && config.threshold <= 1.0)) {
    throw ParameterError(fmt::format("threshold must lie in (0.5, 1], got {}", config.threshold));
  }
  if (config.concurrency < 1) throw ParameterError("concurrency must be at least 1");
  if (config.model.empty()) throw ConfigError("model name is required");
  if (config.lexical.top_k < 1) throw ParameterError("top-k must be at least 1");
  if (config.lexical.orders.empty()) throw ParameterError("at least one n-gram order is required");
  for (int order : config.lexical.orders) check_ngram_order(order);
}

std::shared_ptr<Provider> make_provider(const AuditConfig& config) {
  switch (config.provider) {
    case ProviderMode::kReplay:
      return std::make_shared<ReplayProvider>(ReplayStore::load(config.replay_store));
    case ProviderMode::kMock:
      return std::make_shared<MockProvider>(MockProvider::from_file(config.mock_rules));
    case ProviderMode::kLive: {
      auto live = std::make_shared<LiveProvider>(config.live);
      if (config.replay_store.empty()) return live;
      return std::make_shared<ReplayProvider>(ReplayStore::open_for_recording(config.replay_store),
                                              live);
    }
  }
  throw ConfigError("unknown provider mode");
}

PromptSet load_prompts(const AuditConfig& config) {
  return config.prompts_dir.empty() ? PromptSet::defaults() : load_prompt_set(config.prompts_dir);
}

RunSummary summarize_run(const RunManifest& manifest) {
  return RunSummary{manifest.corpus_digest, manifest.tasks,   manifest.provider,
                    manifest.model,         manifest.prompt_version, manifest.records,
                    manifest.skipped_unlabeled, manifest.unparsed};
}

std::vector<LedgerEntry> MisclassificationLedger::with_truth(std::string_view truth) const {
  std::vector<LedgerEntry> out;
  for (const auto& e : entries) {
    if (e.truth == truth) out.push_back(e);
  }
  return out;
}

std::string excerpt(std::string_view text, std::size_t limit) {
  auto is_lead = [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; };
  std::size_t points = 0;
  for (char c : text) points += is_lead(c) ? 1 : 0;
  if (points <= limit) return std::string(text);

  constexpr std::string_view kEllipsis = "...";
  const std::size_t keep = limit > kEllipsis.size() ? limit - kEllipsis.size() : 0;
  std::size_t seen = 0;
  std::size_t cut = 0;
  for (; cut < text.size(); ++cut) {
    if (is_lead(text[cut])) {
      if (seen == keep) break;
      ++seen;
    }
  }
  return std::string(text.substr(0, cut)) + std::string(kEllipsis.substr(0, limit - keep));
}

MisclassificationLedger build_ledger(std::span<const PredictionRecord> records,
                                     std::span<const LabeledAd> ads, const TextAssembly& text) {
  std::map<std::string, const LabeledAd*> by_id;
  for (const auto& ad : ads) by_id[ad.ad.ad_id] = &ad;

  MisclassificationLedger ledger;
  for (const auto& r : records) {
    if (!r.parsed()) continue;
    auto it = by_id.find(r.ad_id);
    if (it == by_id.end()) {
      throw LabelSetError(fmt::format("prediction for unknown ad {}", r.ad_id));
    }
    auto truth = it->second->target_key(r.task);
    if (!truth) {
      throw LabelSetError(fmt::format("ad {} has a {} prediction but no ground truth", r.ad_id,
                                      key(r.task)));
    }
    if (*truth == *r.predicted_label) continue;
    ledger.entries.push_back(LedgerEntry{r.ad_id, r.task, *truth, *r.predicted_label,
                                         r.explanation, excerpt(ad_text(it->second->ad, text))});
  }
  std::sort(ledger.entries.begin(), ledger.entries.end(),
            [](const LedgerEntry& a, const LedgerEntry& b) {
              return std::tie(a.task, a.ad_id) < std::tie(b.task, b.ad_id);
            });
  return ledger;
}

std::vector<LabeledAd> ingest(const AuditConfig& config) {
  auto ads = load_corpus(config.input, config.format);
  return derive_targets(ads, config.threshold);
}

Evaluation evaluate(std::span<const LabeledAd> ads, std::span<const PredictionRecord> records,
                    UnparsedPolicy policy, const TextAssembly& text) {
  std::vector<Task> tasks;
  std::size_t unparsed = 0;
  for (const auto& r : records) {
    if (std::find(tasks.begin(), tasks.end(), r.task) == tasks.end()) tasks.push_back(r.task);
    if (!r.parsed()) ++unparsed;
  }
  std::sort(tasks.begin(), tasks.end());
  if (tasks.empty()) throw EmptyEvaluationError("no prediction records to evaluate");
  if (unparsed > 0 && policy == UnparsedPolicy::kExclude) {
    spdlog::warn("{} unparsed prediction(s) excluded from accuracy figures", unparsed);
  }

  std::map<Task, TruthTable> truth;
  for (Task t : tasks) truth[t] = truth_for(ads, t);

  Evaluation out;
  out.accuracy = accuracy_breakdown(records, truth, policy);
  for (Task t : tasks) {
    TaskEvaluation e;
    e.task = t;
    e.matrix = confusion_matrix(records, t, truth[t], label_keys(t));
    e.report = classification_report(e.matrix);
    out.tasks.push_back(std::move(e));
  }
  out.ledger = build_ledger(records, ads, text);
  return out;
}

std::vector<FairnessReport> assess_fairness(std::span<const TaskEvaluation> evaluations,
                                            std::span<const ReferenceValue> references) {
  std::vector<FairnessReport> out;
  for (const auto& e : evaluations) {
    FairnessReport report = fairness_report(e.matrix, e.task);
    annotate_divergences(report, references);
    for (const auto& d : report.divergences) {
      spdlog::warn("{} {} {}: {}", key(d.axis), d.group, d.metric, d.note);
    }
    out.push_back(std::move(report));
  }
  return out;
}

std::vector<ThemeSet> synthesize_all(std::span<const LabeledAd> ads,
                                     std::span<const PredictionRecord> records,
                                     std::span<const Task> tasks, Provider& provider,
                                     const PromptSpec& spec, const std::string& model) {
  std::vector<Task> ordered(tasks.begin(), tasks.end());
  std::sort(ordered.begin(), ordered.end());
  ordered.erase(std::unique(ordered.begin(), ordered.end()), ordered.end());

  std::vector<ThemeSet> out;
  for (Task t : ordered) {
    const TruthTable truth = truth_for(ads, t);
    for (const auto& group : label_keys(t)) {
      auto explanations = collect_explanations(records, t, truth, group);
      if (explanations.empty()) continue;
      out.push_back(synthesize_themes(explanations, group, t, provider, spec, model));
    }
  }
  return out;
}

AuditReport run_audit(const AuditConfig& config, AuditArtifacts* artifacts) {
  validate_config(config);
  const PromptSet prompts = load_prompts(config);
  std::vector<ReferenceValue> references;
  if (!config.reference_values.empty()) references = load_reference_values(config.reference_values);
  LexicalOptions lexical = config.lexical;
  if (!config.stopwords.empty()) lexical.tokenizer.stopwords = load_stopwords(config.stopwords);
  auto provider = make_provider(config);

  AuditReport report;
  auto stage = [&](std::string_view section, std::string_view module, std::string_view name,
                   const std::function<void()>& body) {
    try {
      body();
      return true;
    } catch (const Error& e) {
      if (!config.partial) {
        throw StageError(e.category(), std::string(module), std::string(name), e.what());
      }
      spdlog::warn("[{}/{}] {}; section '{}' skipped", module, name, e.what(), section);
      report.skipped.push_back(
          {std::string(section), std::string(module), std::string(name), e.what()});
      return false;
    }
  };
  auto skip_dependent = [&](std::string_view section, std::string_view module,
                            std::string_view name, std::string_view missing) {
    report.skipped.push_back({std::string(section), std::string(module), std::string(name),
                              fmt::format("requires the '{}' section", missing)});
  };

  std::vector<LabeledAd> labeled;
  try {
    labeled = ingest(config);
  } catch (const Error& e) {
    throw StageError(e.category(), "corpus", "ingest", e.what());
  }
  report.corpus = summarize(labeled);

  RunResult run;
  const bool predicted = stage("run", "runner", "predict", [&] {
    RunOptions options;
    options.tasks = config.tasks;
    options.model = config.model;
    options.concurrency = config.concurrency;
    run = run_predictions(labeled, options, provider.get(), prompts);
    report.run = summarize_run(run.manifest);
  });

  std::optional<Evaluation> evaluation;
  if (predicted) {
    stage("evaluation", "evaluator", "evaluate", [&] {
      evaluation = evaluate(labeled, run.records, config.unparsed);
      report.accuracy = evaluation->accuracy;
      report.evaluations = evaluation->tasks;
      report.ledger = evaluation->ledger;
    });
  } else {
    skip_dependent("evaluation", "evaluator", "evaluate", "run");
  }

  if (evaluation) {
    stage("fairness", "fairness", "fairness", [&] {
      report.fairness = assess_fairness(evaluation->tasks, references);
    });
  } else {
    skip_dependent("fairness", "fairness", "fairness", "evaluation");
  }

  stage("lexical", "lexical", "ngrams", [&] { report.lexical = analyze_lexical(labeled, lexical); });

  if (config.themes) {
    if (predicted) {
      stage("themes", "thematics", "themes", [&] {
        report.themes = synthesize_all(labeled, run.records, config.tasks, *provider,
                                       prompts.theme, config.model);
      });
    } else {
      skip_dependent("themes", "thematics", "themes", "run");
    }
  }

  if (artifacts != nullptr) {
    artifacts->labeled = std::move(labeled);
    if (predicted) {
      artifacts->records = std::move(run.records);
      artifacts->manifest = std::move(run.manifest);
    }
  }
  return report;
}

std::optional<ReportFormat> parse_report_format(std::string_view text) {
  if (text == "json") return ReportFormat::kJson;
  if (text == "markdown" || text == "md") return ReportFormat::kMarkdown;
  return std::nullopt;
}

}  // namespace targetlens
