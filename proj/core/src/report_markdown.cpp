#include <algorithm>
#include <string>

#include <fmt/format.h>

#include "targetlens/report.hpp"

namespace targetlens {

namespace {

std::string fixed(double value, int decimals = 2) {
  return fmt::format("{:.{}f}", round_half_up(value, decimals), decimals);
}

std::string cell(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '|') {
      out += "\\|";
    } else if (c == '\n' || c == '\r') {
      out.push_back(' ');
    } else {
      out.push_back(c);
    }
  }
  return out;
}

// Plain pipe table; `numeric` columns are right-aligned by the separator row.
struct Table {
  std::vector<std::string> header;
  std::vector<bool> numeric;
  std::vector<std::vector<std::string>> rows;

  std::string render() const {
    std::string out = "| " + join(header) + " |\n|";
    for (std::size_t i = 0; i < header.size(); ++i) {
      out += (i < numeric.size() && numeric[i]) ? " ---: |" : " --- |";
    }
    out.push_back('\n');
    for (const auto& row : rows) out += "| " + join(row) + " |\n";
    return out;
  }

  static std::string join(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out += " | ";
      out += cells[i];
    }
    return out;
  }
};

std::string axis_title(Task t) { return t == Task::kGender ? "Gender" : "Age group"; }

// Label indices sorted by display name.
std::vector<std::size_t> display_order(const std::vector<std::string>& labels) {
  std::vector<std::size_t> idx(labels.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return display_for_key(labels[a]) < display_for_key(labels[b]);
  });
  return idx;
}

std::string skipped(const AuditReport& report, std::string_view section) {
  for (const auto& s : report.skipped) {
    if (s.section == section) return fmt::format("SKIPPED ({}/{}): {}\n", s.module, s.stage, cell(s.reason));
  }
  return "SKIPPED: not computed\n";
}

}  // namespace

std::string markdown_accuracy(const AccuracyBreakdown& accuracy) {
  Table t{{"Group", "Total", "Correct", "Accuracy (%)", "Misclassified", "Unparsed"},
          {false, true, true, true, false, true},
          {}};
  auto add = [&](const AccuracyRow& r, const std::string& name) {
    std::string wrong;
    for (const auto& [label, n] : r.misclassified) {
      if (!wrong.empty()) wrong += ", ";
      wrong += fmt::format("{} ({})", n, label == "unparsed" ? "Unparsed" : display_for_key(label));
    }
    t.rows.push_back({name, std::to_string(r.total), std::to_string(r.correct),
                      fixed(r.accuracy * 100.0), wrong.empty() ? "-" : wrong,
                      std::to_string(r.unparsed)});
  };
  for (const auto& r : accuracy.groups) add(r, display_for_key(r.group));
  add(accuracy.all, "All");
  return t.render();
}

std::string markdown_evaluation(std::span<const TaskEvaluation> evaluations) {
  std::string out;
  for (const auto& e : evaluations) {
    out += fmt::format("### {}\n\n", axis_title(e.task));
    Table t{{"Class", "Precision", "Recall", "F1-score", "Support"},
            {false, true, true, true, true},
            {}};
    const auto order = display_order(e.matrix.labels());
    for (std::size_t i : order) {
      const auto& c = e.report.classes[i];
      t.rows.push_back({display_for_key(c.label), fixed(c.precision), fixed(c.recall), fixed(c.f1),
                        std::to_string(c.support)});
    }
    t.rows.push_back({"Accuracy", "", "", fixed(e.report.accuracy), std::to_string(e.report.total)});
    for (const auto& [name, avg] : {std::pair{"Macro avg", e.report.macro_avg},
                                    std::pair{"Weighted avg", e.report.weighted_avg}}) {
      t.rows.push_back({name, fixed(avg.precision), fixed(avg.recall), fixed(avg.f1),
                        std::to_string(avg.support)});
    }
    out += t.render();
    out += fmt::format("\nAccuracy to four decimals: {}\n\n", fixed(e.report.accuracy, 4));

    Table cm{{"Actual \\ Predicted"}, {false}, {}};
    for (std::size_t j : order) {
      cm.header.push_back(display_for_key(e.matrix.labels()[j]));
      cm.numeric.push_back(true);
    }
    for (std::size_t i : order) {
      std::vector<std::string> row{display_for_key(e.matrix.labels()[i])};
      for (std::size_t j : order) row.push_back(std::to_string(e.matrix.at(i, j)));
      cm.rows.push_back(std::move(row));
    }
    out += cm.render();
    out.push_back('\n');
  }
  return out;
}

std::string markdown_fairness(std::span<const FairnessReport> reports) {
  std::string out;
  for (const auto& f : reports) {
    out += fmt::format("### {}\n\n", axis_title(f.axis));
    Table t{{"Group", "DP ratio", "TPR", "FPR", "Actual", "Predicted", "TP", "FP", "Negatives"},
            {false, true, true, true, true, true, true, true, true},
            {}};
    std::vector<const GroupFairness*> groups;
    for (const auto& g : f.groups) groups.push_back(&g);
    std::sort(groups.begin(), groups.end(), [](const GroupFairness* a, const GroupFairness* b) {
      return display_for_key(a->group) < display_for_key(b->group);
    });
    for (const auto* g : groups) {
      t.rows.push_back({display_for_key(g->group), fixed(g->dp_ratio), fixed(g->tpr), fixed(g->fpr),
                        std::to_string(g->counts.actual), std::to_string(g->counts.predicted),
                        std::to_string(g->counts.tp), std::to_string(g->counts.fp),
                        std::to_string(g->counts.negatives)});
    }
    out += t.render();
    if (!f.divergences.empty()) {
      out += "\nReference divergences:\n\n";
      for (const auto& d : f.divergences) {
        out += fmt::format("- {} {}: reference {:.{}f}, computed {}. {}\n",
                           display_for_key(d.group), d.metric, d.reference, d.decimals,
                           fixed(d.computed, 4), d.note);
      }
    }
    out.push_back('\n');
  }
  return out;
}

std::string markdown_lexical(const LexicalAnalysis& lexical) {
  std::string out;
  for (const auto& test : lexical.tests) {
    out += fmt::format("### {} {}-grams\n\n", axis_title(test.axis), test.order);
    for (const auto& table : lexical.tables) {
      if (table.order != test.order ||
          std::find(test.table.rows.begin(), test.table.rows.end(), table.group) ==
              test.table.rows.end()) {
        continue;
      }
      out += fmt::format("{}:\n\n", display_for_key(table.group));
      Table t{{"Rank", "N-gram", "Count"}, {true, false, true}, {}};
      for (std::size_t i = 0; i < table.entries.size(); ++i) {
        t.rows.push_back({std::to_string(i + 1), join_ngram(table.entries[i].ngram),
                          std::to_string(table.entries[i].count)});
      }
      out += t.render();
      out.push_back('\n');
    }
    if (test.result) {
      out += fmt::format("Chi-square test: statistic {}, dof {}, p-value {}\n\n",
                         fixed(test.result->statistic), test.result->degrees_of_freedom,
                         fixed(test.result->p_value, 4));
    } else {
      out += fmt::format("Chi-square test: SKIPPED ({})\n\n", test.skipped_reason);
    }
  }
  if (!lexical.excluded_groups.empty()) {
    std::string names;
    for (const auto& g : lexical.excluded_groups) {
      if (!names.empty()) names += ", ";
      names += display_for_key(g);
    }
    out += fmt::format("Groups below the minimum size: {}\n\n", names);
  }
  return out;
}

std::string markdown_themes(std::span<const ThemeSet> themes) {
  std::string out;
  for (const auto& t : themes) {
    out += fmt::format("### {}: {}\n\nFrom {} explanations.\n\n", display_for_key(t.group),
                       cell(t.theme), t.source_count);
    Table table{{"Aspect", "Description"}, {false, false}, {}};
    for (const auto& a : t.aspects) table.rows.push_back({cell(a.name), cell(a.description)});
    out += table.render();
    out.push_back('\n');
  }
  return out;
}

std::string markdown_ledger(const MisclassificationLedger& ledger) {
  Table t{{"Ad", "Task", "Truth", "Prediction", "Explanation", "Excerpt"},
          {false, false, false, false, false, false},
          {}};
  for (const auto& e : ledger.entries) {
    t.rows.push_back({e.ad_id, std::string(key(e.task)), display_for_key(e.truth),
                      display_for_key(e.prediction), cell(e.explanation), cell(e.excerpt)});
  }
  return t.render();
}

std::string render_markdown(const AuditReport& report) {
  std::string out = "# Targeting audit report\n\n";
  if (report.partial()) out += "Partial report: some sections were skipped.\n\n";

  out += "## Corpus\n\n";
  if (report.corpus) {
    const auto& c = *report.corpus;
    out += fmt::format("{} ads, {} with an exclusive target.\n\n", c.total_ads, c.targeted_ads);
    Table t{{"Axis", "Group", "Ads"}, {false, false, true}, {}};
    for (const auto& [label, n] : c.gender_targets) {
      t.rows.push_back({"Gender", display_for_key(label), std::to_string(n)});
    }
    for (const auto& [label, n] : c.age_targets) {
      t.rows.push_back({"Age group", display_for_key(label), std::to_string(n)});
    }
    out += t.render();
  } else {
    out += skipped(report, "corpus");
  }

  out += "\n## Run\n\n";
  if (report.run) {
    const auto& r = *report.run;
    std::string tasks;
    for (Task t : r.tasks) {
      if (!tasks.empty()) tasks += ", ";
      tasks += key(t);
    }
    out += fmt::format(
        "- Provider: {}\n- Model: {}\n- Prompt version: {}\n- Tasks: {}\n- Records: {}\n"
        "- Unparsed: {}\n- Corpus digest: {}\n",
        r.provider, r.model, r.prompt_version, tasks, r.records, r.unparsed, r.corpus_digest);
  } else {
    out += skipped(report, "run");
  }

  out += "\n## Accuracy\n\n";
  out += report.accuracy ? markdown_accuracy(*report.accuracy) : skipped(report, "evaluation");

  out += "\n## Classification reports\n\n";
  out += report.evaluations ? markdown_evaluation(*report.evaluations) : skipped(report, "evaluation");

  out += "\n## Fairness\n\n";
  out += report.fairness ? markdown_fairness(*report.fairness) : skipped(report, "fairness");

  out += "\n## N-gram analysis\n\n";
  out += report.lexical ? markdown_lexical(*report.lexical) : skipped(report, "lexical");

  out += "\n## Themes\n\n";
  out += report.themes ? markdown_themes(*report.themes) : skipped(report, "themes");

  out += "\n## Misclassified ads\n\n";
  out += report.ledger ? markdown_ledger(*report.ledger) : skipped(report, "evaluation");
  return out;
}

}  // namespace targetlens
