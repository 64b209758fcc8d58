#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "targetlens/error.hpp"
#include "targetlens/report.hpp"

namespace fs = std::filesystem;
using namespace targetlens;

namespace {

// Flags shared by all subcommands; each subcommand registers the ones it uses.
struct Options {
  fs::path input;
  std::string format = "jsonl";
  std::string provider = "replay";
  std::string model = "o1-preview";
  fs::path replay_store;
  fs::path mock_rules;
  fs::path prompts;
  fs::path reference_values;
  fs::path stopwords;
  std::vector<std::string> tasks = {"gender", "age"};
  double threshold = kDefaultExclusivityThreshold;
  std::size_t concurrency = 1;
  std::size_t top_k = 5;
  std::vector<int> ngram_orders;
  std::size_t min_group_size = 10;
  fs::path out = "out";
  std::vector<std::string> report = {"json", "markdown"};
  bool strict = false;
  bool partial = false;
  bool no_themes = false;
  std::string endpoint;
  std::string api_key_env;
  std::string ledger_truth;
  bool quiet = false;
};

AuditConfig to_config(const Options& o) {
  AuditConfig c;
  c.input = o.input;
  auto format = parse_corpus_format(o.format);
  if (!format) throw ConfigError(fmt::format("unknown corpus format '{}'", o.format));
  c.format = *format;
  auto mode = parse_provider_mode(o.provider);
  if (!mode) throw ConfigError(fmt::format("unknown provider '{}'", o.provider));
  c.provider = *mode;
  c.model = o.model;
  c.replay_store = o.replay_store;
  c.mock_rules = o.mock_rules;
  c.prompts_dir = o.prompts;
  c.reference_values = o.reference_values;
  c.stopwords = o.stopwords;
  c.tasks.clear();
  for (const auto& name : o.tasks) {
    auto task = parse_task(name);
    if (!task || *task == Task::kTheme) throw ConfigError(fmt::format("unknown task '{}'", name));
    c.tasks.push_back(*task);
  }
  c.threshold = o.threshold;
  c.concurrency = o.concurrency;
  c.lexical.top_k = o.top_k;
  if (!o.ngram_orders.empty()) c.lexical.orders = o.ngram_orders;
  c.lexical.min_group_size = o.min_group_size;
  c.unparsed = o.strict ? UnparsedPolicy::kStrict : UnparsedPolicy::kExclude;
  c.partial = o.partial;
  c.themes = !o.no_themes;
  if (!o.endpoint.empty()) c.live.endpoint = o.endpoint;
  if (!o.api_key_env.empty()) c.live.api_key_env = o.api_key_env;
  return c;
}

std::vector<ReportFormat> report_formats(const Options& o) {
  std::vector<ReportFormat> out;
  for (const auto& name : o.report) {
    auto f = parse_report_format(name);
    if (!f) throw ConfigError(fmt::format("unknown report format '{}'", name));
    if (std::find(out.begin(), out.end(), *f) == out.end()) out.push_back(*f);
  }
  return out;
}

bool wants(const Options& o, ReportFormat format) {
  auto formats = report_formats(o);
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

void write_file(const fs::path& path, const std::string& contents) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot write {}", path.string()));
  out << contents;
  spdlog::info("wrote {}", path.string());
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(fmt::format("{} not found; run the earlier stage first", path.string()));
  }
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

// labeled.jsonl from --input when given, otherwise from a previous ingest.
std::vector<LabeledAd> labeled_ads(const Options& o) {
  if (!o.input.empty()) {
    AuditConfig c = to_config(o);
    if (!fs::exists(c.input)) throw ConfigError(fmt::format("input corpus not found: {}", c.input.string()));
    return ingest(c);
  }
  const fs::path path = o.out / "labeled.jsonl";
  if (!fs::exists(path)) throw ConfigError(fmt::format("{} not found; run ingest first", path.string()));
  return load_labeled(path);
}

std::vector<PredictionRecord> stored_predictions(const Options& o) {
  const fs::path path = o.out / "predictions.jsonl";
  if (!fs::exists(path)) throw ConfigError(fmt::format("{} not found; run predict first", path.string()));
  return load_predictions(path);
}

void check_provider(const AuditConfig& c) {
  if (c.provider == ProviderMode::kReplay && (c.replay_store.empty() || !fs::exists(c.replay_store))) {
    throw ConfigError("replay mode needs an existing --replay-store");
  }
  if (c.provider == ProviderMode::kMock && (c.mock_rules.empty() || !fs::exists(c.mock_rules))) {
    throw ConfigError("mock mode needs an existing --mock-rules file");
  }
}

// ---------------------------------------------------------------------------

int cmd_ingest(const Options& o) {
  if (o.input.empty()) throw ConfigError("ingest needs --input");
  auto labeled = labeled_ads(o);
  std::ostringstream lines;
  write_labeled(lines, labeled);
  write_file(o.out / "labeled.jsonl", lines.str());
  const CorpusSummary summary = summarize(labeled);
  write_file(o.out / "corpus_summary.json", dump(to_json(summary)));
  std::cout << fmt::format("{} ads, {} with an exclusive target\n", summary.total_ads,
                           summary.targeted_ads);
  return 0;
}

int cmd_predict(const Options& o) {
  AuditConfig c = to_config(o);
  check_provider(c);
  auto labeled = labeled_ads(o);
  auto provider = make_provider(c);
  RunOptions options;
  options.tasks = c.tasks;
  options.model = c.model;
  options.concurrency = c.concurrency;
  auto run = run_predictions(labeled, options, provider.get(), load_prompts(c));
  std::ostringstream lines;
  write_predictions(lines, run.records);
  write_file(o.out / "predictions.jsonl", lines.str());
  write_file(o.out / "predictions.manifest.json", dump(to_json(run.manifest)));
  std::cout << fmt::format("{} predictions, {} unparsed\n", run.manifest.records,
                           run.manifest.unparsed);
  return 0;
}

int cmd_evaluate(const Options& o) {
  auto labeled = labeled_ads(o);
  auto records = stored_predictions(o);
  auto eval = evaluate(labeled, records,
                       o.strict ? UnparsedPolicy::kStrict : UnparsedPolicy::kExclude);
  nlohmann::ordered_json j;
  j["accuracy"] = to_json(eval.accuracy);
  j["evaluations"] = nlohmann::ordered_json::array();
  for (const auto& e : eval.tasks) j["evaluations"].push_back(to_json(e));
  j["ledger"] = to_json(eval.ledger);
  write_file(o.out / "evaluation.json", dump(j));
  if (wants(o, ReportFormat::kMarkdown)) {
    write_file(o.out / "evaluation.md", "## Accuracy\n\n" + markdown_accuracy(eval.accuracy) +
                                            "\n## Classification reports\n\n" +
                                            markdown_evaluation(eval.tasks) +
                                            "\n## Misclassified ads\n\n" + markdown_ledger(eval.ledger));
  }
  if (!o.ledger_truth.empty()) {
    MisclassificationLedger filtered{eval.ledger.with_truth(o.ledger_truth)};
    std::cout << markdown_ledger(filtered);
  } else {
    std::cout << markdown_accuracy(eval.accuracy);
  }
  return 0;
}

int cmd_fairness(const Options& o) {
  const auto j = read_json(o.out / "evaluation.json");
  std::vector<TaskEvaluation> evaluations;
  try {
    for (const auto& e : j.at("evaluations")) evaluations.push_back(evaluation_from_json(e));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(fmt::format("evaluation.json: {}", e.what()));
  }
  std::vector<ReferenceValue> refs;
  if (!o.reference_values.empty()) refs = load_reference_values(o.reference_values);
  auto reports = assess_fairness(evaluations, refs);
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& r : reports) out.push_back(to_json(r));
  write_file(o.out / "fairness.json", dump(out));
  const std::string md = markdown_fairness(reports);
  if (wants(o, ReportFormat::kMarkdown)) write_file(o.out / "fairness.md", md);
  std::cout << md;
  return 0;
}

int cmd_ngrams(const Options& o) {
  AuditConfig c = to_config(o);
  auto labeled = labeled_ads(o);
  LexicalOptions lexical = c.lexical;
  if (!c.stopwords.empty()) lexical.tokenizer.stopwords = load_stopwords(c.stopwords);
  auto analysis = analyze_lexical(labeled, lexical);
  write_file(o.out / "ngrams.json", dump(to_json(analysis)));
  const std::string md = markdown_lexical(analysis);
  if (wants(o, ReportFormat::kMarkdown)) write_file(o.out / "ngrams.md", md);
  std::cout << md;
  return 0;
}

int cmd_themes(const Options& o) {
  AuditConfig c = to_config(o);
  check_provider(c);
  auto labeled = labeled_ads(o);
  auto records = stored_predictions(o);
  auto provider = make_provider(c);
  std::vector<Task> tasks;
  for (const auto& r : records) {
    if (std::find(tasks.begin(), tasks.end(), r.task) == tasks.end()) tasks.push_back(r.task);
  }
  auto themes = synthesize_all(labeled, records, tasks, *provider, load_prompts(c).theme, c.model);
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& t : themes) out.push_back(to_json(t));
  write_file(o.out / "themes.json", dump(out));
  const std::string md = markdown_themes(themes);
  if (wants(o, ReportFormat::kMarkdown)) write_file(o.out / "themes.md", md);
  std::cout << md;
  return 0;
}

int cmd_audit(const Options& o) {
  AuditConfig c = to_config(o);
  const auto formats = report_formats(o);
  AuditArtifacts artifacts;
  AuditReport report = run_audit(c, &artifacts);

  std::ostringstream labeled;
  write_labeled(labeled, artifacts.labeled);
  write_file(o.out / "labeled.jsonl", labeled.str());
  if (artifacts.manifest) {
    std::ostringstream preds;
    write_predictions(preds, artifacts.records);
    write_file(o.out / "predictions.jsonl", preds.str());
    write_file(o.out / "predictions.manifest.json", dump(to_json(*artifacts.manifest)));
  }
  for (ReportFormat f : formats) {
    write_file(o.out / (f == ReportFormat::kJson ? "report.json" : "report.md"),
               render_report(report, f));
  }
  if (report.accuracy) {
    const auto& all = report.accuracy->all;
    std::cout << fmt::format("overall accuracy {}/{} = {:.2f}%\n", all.correct, all.total,
                             100.0 * all.accuracy);
  }
  if (report.partial()) {
    spdlog::warn("partial report: {} section(s) skipped", report.skipped.size());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("targetlens");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"Audit demographic targeting of ad texts with a language model"};
  app.require_subcommand(1);
  Options o;

  auto add_corpus = [&](CLI::App* cmd) {
    cmd->add_option("--input", o.input, "Ad corpus (JSONL or CSV)");
    cmd->add_option("--format", o.format, "Corpus format")->check(CLI::IsMember({"jsonl", "csv"}));
    cmd->add_option("--threshold", o.threshold, "Exclusivity threshold in (0.5, 1]");
  };
  auto add_provider = [&](CLI::App* cmd) {
    cmd->add_option("--provider", o.provider, "live, replay or mock")
        ->check(CLI::IsMember({"live", "replay", "mock"}));
    cmd->add_option("--model", o.model, "Model name sent to the provider");
    cmd->add_option("--replay-store", o.replay_store, "Replay store (JSONL)");
    cmd->add_option("--mock-rules", o.mock_rules, "Mock provider rules (JSON)");
    cmd->add_option("--prompts", o.prompts, "Directory with gender/age/theme .prompt files");
    cmd->add_option("--endpoint", o.endpoint, "Chat completion endpoint for live mode");
    cmd->add_option("--api-key-env", o.api_key_env, "Environment variable holding the API key");
  };
  auto add_out = [&](CLI::App* cmd) {
    cmd->add_option("--out", o.out, "Working directory for stage files");
    cmd->add_option("--report", o.report, "Report formats: json, markdown")->delimiter(',');
  };
  auto add_lexical = [&](CLI::App* cmd) {
    cmd->add_option("--top-k", o.top_k, "N-grams kept per group");
    cmd->add_option("--ngram-order", o.ngram_orders, "2 or 3 (default both)")->delimiter(',');
    cmd->add_option("--stopwords", o.stopwords, "Stopword list, one word per line");
    cmd->add_option("--min-group-size", o.min_group_size, "Smallest group analyzed");
  };
  auto add_tasks = [&](CLI::App* cmd) {
    cmd->add_option("--tasks", o.tasks, "gender,age")->delimiter(',');
    cmd->add_option("--concurrency", o.concurrency, "Requests in flight");
  };

  auto* ingest_cmd = app.add_subcommand("ingest", "Load a corpus and derive targets");
  add_corpus(ingest_cmd);
  add_out(ingest_cmd);

  auto* predict_cmd = app.add_subcommand("predict", "Classify ads through a provider");
  add_corpus(predict_cmd);
  add_provider(predict_cmd);
  add_tasks(predict_cmd);
  add_out(predict_cmd);

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score stored predictions");
  add_corpus(evaluate_cmd);
  add_out(evaluate_cmd);
  evaluate_cmd->add_flag("--strict", o.strict, "Count unparsed predictions as wrong");
  evaluate_cmd->add_option("--ledger-truth", o.ledger_truth, "Print misclassified ads of a group");

  auto* fairness_cmd = app.add_subcommand("fairness", "Fairness metrics from an evaluation");
  add_out(fairness_cmd);
  fairness_cmd->add_option("--reference-values", o.reference_values, "Reference values to compare");

  auto* ngrams_cmd = app.add_subcommand("ngrams", "N-gram tables and chi-square tests");
  add_corpus(ngrams_cmd);
  add_out(ngrams_cmd);
  add_lexical(ngrams_cmd);

  auto* themes_cmd = app.add_subcommand("themes", "Synthesize themes from explanations");
  add_corpus(themes_cmd);
  add_provider(themes_cmd);
  add_out(themes_cmd);

  auto* audit_cmd = app.add_subcommand("audit", "Run every stage and write the report");
  add_corpus(audit_cmd);
  add_provider(audit_cmd);
  add_tasks(audit_cmd);
  add_out(audit_cmd);
  add_lexical(audit_cmd);
  audit_cmd->add_option("--reference-values", o.reference_values, "Reference values to compare");
  audit_cmd->add_flag("--strict", o.strict, "Count unparsed predictions as wrong");
  audit_cmd->add_flag("--partial", o.partial, "Write a report even when a stage fails");
  audit_cmd->add_flag("--no-themes", o.no_themes, "Skip theme synthesis");

  app.add_flag("-q,--quiet", o.quiet, "Only log warnings and errors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_code_for(ErrorCategory::kConfig);
  }
  spdlog::set_level(o.quiet ? spdlog::level::warn : spdlog::level::info);

  try {
    if (*ingest_cmd) return cmd_ingest(o);
    if (*predict_cmd) return cmd_predict(o);
    if (*evaluate_cmd) return cmd_evaluate(o);
    if (*fairness_cmd) return cmd_fairness(o);
    if (*ngrams_cmd) return cmd_ngrams(o);
    if (*themes_cmd) return cmd_themes(o);
    if (*audit_cmd) return cmd_audit(o);
  } catch (const Error& e) {
    spdlog::error("{} error: {}", category_name(e.category()), e.what());
    return exit_code_for(e.category());
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return exit_code_for(ErrorCategory::kData);
  }
  return 0;
}
