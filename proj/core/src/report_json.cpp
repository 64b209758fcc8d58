#include <fmt/format.h>

#include "targetlens/error.hpp"
#include "targetlens/report.hpp"

namespace targetlens {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

Task task_from(const json& j) {
  auto t = parse_task(j.get<std::string>());
  if (!t) throw SchemaError(fmt::format("unknown task {}", j.dump()));
  return *t;
}

ordered_json ngram_json(const Ngram& ngram) {
  ordered_json out = ordered_json::array();
  for (const auto& token : ngram) out.push_back(token);
  return out;
}

Ngram ngram_from(const json& j) { return j.get<Ngram>(); }

ordered_json table_json(const NgramTable& t) {
  ordered_json entries = ordered_json::array();
  for (const auto& e : t.entries) {
    entries.push_back({{"ngram", ngram_json(e.ngram)}, {"count", e.count}});
  }
  return {{"group", t.group},
          {"order", t.order},
          {"total_windows", t.total_windows},
          {"entries", std::move(entries)}};
}

NgramTable table_from(const json& j) {
  NgramTable t;
  t.group = j.at("group").get<std::string>();
  t.order = j.at("order").get<int>();
  t.total_windows = j.at("total_windows").get<std::int64_t>();
  for (const auto& e : j.at("entries")) {
    t.entries.push_back({ngram_from(e.at("ngram")), e.at("count").get<std::int64_t>()});
  }
  return t;
}

ordered_json chi_json(const ChiSquareResult& r) {
  return {{"statistic", r.statistic},
          {"degrees_of_freedom", r.degrees_of_freedom},
          {"p_value", r.p_value},
          {"observed", r.observed},
          {"expected", r.expected}};
}

ChiSquareResult chi_from(const json& j) {
  ChiSquareResult r;
  r.statistic = j.at("statistic").get<double>();
  r.degrees_of_freedom = j.at("degrees_of_freedom").get<int>();
  r.p_value = j.at("p_value").get<double>();
  r.observed = j.at("observed").get<std::vector<std::vector<std::int64_t>>>();
  r.expected = j.at("expected").get<std::vector<std::vector<double>>>();
  return r;
}

ordered_json row_json(const AccuracyRow& r) {
  ordered_json out;
  out["group"] = r.group;
  out["task"] = r.task ? json(std::string(key(*r.task))) : json(nullptr);
  out["total"] = r.total;
  out["correct"] = r.correct;
  out["accuracy"] = r.accuracy;
  out["misclassified"] = r.misclassified;
  out["unparsed"] = r.unparsed;
  return out;
}

AccuracyRow row_from(const json& j) {
  AccuracyRow r;
  r.group = j.at("group").get<std::string>();
  if (!j.at("task").is_null()) r.task = task_from(j.at("task"));
  r.total = j.at("total").get<std::int64_t>();
  r.correct = j.at("correct").get<std::int64_t>();
  r.accuracy = j.at("accuracy").get<double>();
  r.misclassified = j.at("misclassified").get<std::map<std::string, std::int64_t>>();
  r.unparsed = j.at("unparsed").get<std::int64_t>();
  return r;
}

ordered_json averages_json(const AverageMetrics& a) {
  return {{"precision", a.precision}, {"recall", a.recall}, {"f1", a.f1}, {"support", a.support}};
}

AverageMetrics averages_from(const json& j) {
  return {j.at("precision").get<double>(), j.at("recall").get<double>(), j.at("f1").get<double>(),
          j.at("support").get<std::int64_t>()};
}

template <typename T, typename Fn>
ordered_json array_of(const std::vector<T>& items, Fn fn) {
  ordered_json out = ordered_json::array();
  for (const auto& item : items) out.push_back(fn(item));
  return out;
}

template <typename T, typename Fn>
std::vector<T> vector_from(const json& j, Fn fn) {
  std::vector<T> out;
  for (const auto& item : j) out.push_back(fn(item));
  return out;
}

}  // namespace

ordered_json to_json(const CorpusSummary& s) {
  return {{"total_ads", s.total_ads},
          {"targeted_ads", s.targeted_ads},
          {"gender_targets", s.gender_targets},
          {"age_targets", s.age_targets}};
}

ordered_json to_json(const RunSummary& run) {
  ordered_json tasks = ordered_json::array();
  for (Task t : run.tasks) tasks.push_back(std::string(key(t)));
  return {{"corpus_digest", run.corpus_digest},
          {"tasks", std::move(tasks)},
          {"provider", run.provider},
          {"model", run.model},
          {"prompt_version", run.prompt_version},
          {"records", run.records},
          {"skipped_unlabeled", run.skipped_unlabeled},
          {"unparsed", run.unparsed}};
}

ordered_json to_json(const AccuracyBreakdown& a) {
  return {{"groups", array_of(a.groups, row_json)}, {"all", row_json(a.all)}};
}

AccuracyBreakdown accuracy_from_json(const json& j) {
  return {vector_from<AccuracyRow>(j.at("groups"), row_from), row_from(j.at("all"))};
}

ordered_json to_json(const TaskEvaluation& e) {
  ordered_json classes = ordered_json::array();
  for (const auto& c : e.report.classes) {
    classes.push_back({{"label", c.label},
                       {"precision", c.precision},
                       {"recall", c.recall},
                       {"f1", c.f1},
                       {"support", c.support}});
  }
  return {{"task", std::string(key(e.task))},
          {"confusion_matrix", {{"labels", e.matrix.labels()}, {"counts", e.matrix.counts()}}},
          {"report",
           {{"classes", std::move(classes)},
            {"accuracy", e.report.accuracy},
            {"total", e.report.total},
            {"macro_avg", averages_json(e.report.macro_avg)},
            {"weighted_avg", averages_json(e.report.weighted_avg)}}}};
}

TaskEvaluation evaluation_from_json(const json& j) {
  TaskEvaluation e;
  e.task = task_from(j.at("task"));
  const auto& cm = j.at("confusion_matrix");
  e.matrix = ConfusionMatrix(cm.at("labels").get<std::vector<std::string>>(),
                             cm.at("counts").get<std::vector<std::vector<std::int64_t>>>());
  const auto& r = j.at("report");
  for (const auto& c : r.at("classes")) {
    e.report.classes.push_back({c.at("label").get<std::string>(), c.at("precision").get<double>(),
                                c.at("recall").get<double>(), c.at("f1").get<double>(),
                                c.at("support").get<std::int64_t>()});
  }
  e.report.accuracy = r.at("accuracy").get<double>();
  e.report.total = r.at("total").get<std::int64_t>();
  e.report.macro_avg = averages_from(r.at("macro_avg"));
  e.report.weighted_avg = averages_from(r.at("weighted_avg"));
  return e;
}

ordered_json to_json(const FairnessReport& f) {
  ordered_json groups = ordered_json::array();
  for (const auto& g : f.groups) {
    groups.push_back({{"group", g.group},
                      {"dp_ratio", g.dp_ratio},
                      {"tpr", g.tpr},
                      {"fpr", g.fpr},
                      {"counts",
                       {{"actual", g.counts.actual},
                        {"predicted", g.counts.predicted},
                        {"tp", g.counts.tp},
                        {"fp", g.counts.fp},
                        {"negatives", g.counts.negatives}}}});
  }
  ordered_json divergences = ordered_json::array();
  for (const auto& d : f.divergences) {
    divergences.push_back({{"kind", "reference_divergence"},
                           {"axis", std::string(key(d.axis))},
                           {"group", d.group},
                           {"metric", d.metric},
                           {"reference", d.reference},
                           {"computed", d.computed},
                           {"decimals", d.decimals},
                           {"note", d.note}});
  }
  return {{"axis", std::string(key(f.axis))},
          {"total", f.total},
          {"groups", std::move(groups)},
          {"divergences", std::move(divergences)}};
}

FairnessReport fairness_from_json(const json& j) {
  FairnessReport f;
  f.axis = task_from(j.at("axis"));
  f.total = j.at("total").get<std::int64_t>();
  for (const auto& g : j.at("groups")) {
    const auto& c = g.at("counts");
    f.groups.push_back({g.at("group").get<std::string>(), g.at("dp_ratio").get<double>(),
                        g.at("tpr").get<double>(), g.at("fpr").get<double>(),
                        GroupCounts{c.at("actual").get<std::int64_t>(),
                                    c.at("predicted").get<std::int64_t>(),
                                    c.at("tp").get<std::int64_t>(), c.at("fp").get<std::int64_t>(),
                                    c.at("negatives").get<std::int64_t>()}});
  }
  for (const auto& d : j.at("divergences")) {
    f.divergences.push_back({task_from(d.at("axis")), d.at("group").get<std::string>(),
                             d.at("metric").get<std::string>(), d.at("reference").get<double>(),
                             d.at("computed").get<double>(), d.at("decimals").get<int>(),
                             d.at("note").get<std::string>()});
  }
  return f;
}

ordered_json to_json(const LexicalAnalysis& l) {
  ordered_json tests = ordered_json::array();
  for (const auto& t : l.tests) {
    tests.push_back({{"axis", std::string(key(t.axis))},
                     {"order", t.order},
                     {"rows", t.table.rows},
                     {"columns", array_of(t.table.columns, ngram_json)},
                     {"counts", t.table.counts},
                     {"result", t.result ? chi_json(*t.result) : ordered_json(nullptr)},
                     {"skipped_reason", t.skipped_reason}});
  }
  return {{"tables", array_of(l.tables, table_json)},
          {"tests", std::move(tests)},
          {"excluded_groups", l.excluded_groups}};
}

LexicalAnalysis lexical_from_json(const json& j) {
  LexicalAnalysis l;
  l.tables = vector_from<NgramTable>(j.at("tables"), table_from);
  for (const auto& t : j.at("tests")) {
    LexicalTest test;
    test.axis = task_from(t.at("axis"));
    test.order = t.at("order").get<int>();
    test.table.rows = t.at("rows").get<std::vector<std::string>>();
    test.table.columns = vector_from<Ngram>(t.at("columns"), ngram_from);
    test.table.counts = t.at("counts").get<std::vector<std::vector<std::int64_t>>>();
    if (!t.at("result").is_null()) test.result = chi_from(t.at("result"));
    test.skipped_reason = t.at("skipped_reason").get<std::string>();
    l.tests.push_back(std::move(test));
  }
  l.excluded_groups = j.at("excluded_groups").get<std::vector<std::string>>();
  return l;
}

ordered_json to_json(const MisclassificationLedger& ledger) {
  return array_of(ledger.entries, [](const LedgerEntry& e) {
    return ordered_json{{"ad_id", e.ad_id},
                        {"task", std::string(key(e.task))},
                        {"truth", e.truth},
                        {"prediction", e.prediction},
                        {"explanation", e.explanation},
                        {"excerpt", e.excerpt}};
  });
}

MisclassificationLedger ledger_from_json(const json& j) {
  MisclassificationLedger ledger;
  for (const auto& e : j) {
    ledger.entries.push_back({e.at("ad_id").get<std::string>(), task_from(e.at("task")),
                              e.at("truth").get<std::string>(), e.at("prediction").get<std::string>(),
                              e.at("explanation").get<std::string>(),
                              e.at("excerpt").get<std::string>()});
  }
  return ledger;
}

ordered_json report_to_json(const AuditReport& r) {
  auto opt = [](const auto& value, auto fn) {
    return value ? ordered_json(fn(*value)) : ordered_json(nullptr);
  };
  auto each = [](const auto& items) {
    ordered_json out = ordered_json::array();
    for (const auto& item : items) out.push_back(to_json(item));
    return out;
  };
  ordered_json out;
  out["corpus"] = opt(r.corpus, [](const auto& v) { return to_json(v); });
  out["run"] = opt(r.run, [](const auto& v) { return to_json(v); });
  out["accuracy"] = opt(r.accuracy, [](const auto& v) { return to_json(v); });
  out["evaluations"] = opt(r.evaluations, each);
  out["fairness"] = opt(r.fairness, each);
  out["lexical"] = opt(r.lexical, [](const auto& v) { return to_json(v); });
  out["themes"] = opt(r.themes, each);
  out["ledger"] = opt(r.ledger, [](const auto& v) { return to_json(v); });
  out["skipped"] = array_of(r.skipped, [](const SkippedSection& s) {
    return ordered_json{{"section", s.section},
                        {"module", s.module},
                        {"stage", s.stage},
                        {"reason", s.reason}};
  });
  return out;
}

AuditReport report_from_json(const json& j) {
  try {
    AuditReport r;
    auto present = [&](const char* name) { return j.contains(name) && !j.at(name).is_null(); };
    if (present("corpus")) {
      const auto& c = j.at("corpus");
      r.corpus = CorpusSummary{c.at("total_ads").get<std::size_t>(),
                               c.at("gender_targets").get<std::map<std::string, std::size_t>>(),
                               c.at("age_targets").get<std::map<std::string, std::size_t>>(),
                               c.at("targeted_ads").get<std::size_t>()};
    }
    if (present("run")) {
      const auto& c = j.at("run");
      RunSummary run;
      run.corpus_digest = c.at("corpus_digest").get<std::string>();
      run.tasks = vector_from<Task>(c.at("tasks"), task_from);
      run.provider = c.at("provider").get<std::string>();
      run.model = c.at("model").get<std::string>();
      run.prompt_version = c.at("prompt_version").get<std::string>();
      run.records = c.at("records").get<std::size_t>();
      run.skipped_unlabeled = c.at("skipped_unlabeled").get<std::size_t>();
      run.unparsed = c.at("unparsed").get<std::size_t>();
      r.run = std::move(run);
    }
    if (present("accuracy")) r.accuracy = accuracy_from_json(j.at("accuracy"));
    if (present("evaluations")) {
      r.evaluations = vector_from<TaskEvaluation>(j.at("evaluations"), evaluation_from_json);
    }
    if (present("fairness")) {
      r.fairness = vector_from<FairnessReport>(j.at("fairness"), fairness_from_json);
    }
    if (present("lexical")) r.lexical = lexical_from_json(j.at("lexical"));
    if (present("themes")) r.themes = vector_from<ThemeSet>(j.at("themes"), theme_set_from_json);
    if (present("ledger")) r.ledger = ledger_from_json(j.at("ledger"));
    if (j.contains("skipped")) {
      for (const auto& s : j.at("skipped")) {
        r.skipped.push_back({s.at("section").get<std::string>(), s.at("module").get<std::string>(),
                             s.at("stage").get<std::string>(), s.at("reason").get<std::string>()});
      }
    }
    return r;
  } catch (const json::exception& e) {
    throw SchemaError(fmt::format("malformed report: {}", e.what()));
  }
}

std::string render_report(const AuditReport& report, ReportFormat format) {
  if (format == ReportFormat::kJson) return report_to_json(report).dump(2) + "\n";
  return render_markdown(report);
}

}  // namespace targetlens
