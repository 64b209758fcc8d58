#include "targetlens/fairness.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "targetlens/error.hpp"

namespace targetlens {

namespace {

double ratio(std::int64_t num, std::int64_t den, const std::string& group, const char* metric) {
  if (den == 0) throw UndefinedGroupError(group, metric);
  return static_cast<double>(num) / static_cast<double>(den);
}

GroupCounts counts_for(const ConfusionMatrix& cm, std::size_t g) {
  GroupCounts c;
  c.actual = cm.row_sum(g);
  c.predicted = cm.col_sum(g);
  c.tp = cm.at(g, g);
  c.fp = c.predicted - c.tp;
  c.negatives = cm.total() - c.actual;
  return c;
}

template <typename Fn>
std::map<std::string, double> per_group(const ConfusionMatrix& cm, Fn fn) {
  std::map<std::string, double> out;
  for (std::size_t g = 0; g < cm.size(); ++g) {
    out[cm.labels()[g]] = fn(counts_for(cm, g), cm.labels()[g]);
  }
  return out;
}

}  // namespace

std::map<std::string, double> demographic_parity(const ConfusionMatrix& cm) {
  return per_group(cm, [](const GroupCounts& c, const std::string& g) {
    return ratio(c.predicted, c.actual, g, "demographic parity");
  });
}

std::map<std::string, double> equal_opportunity(const ConfusionMatrix& cm) {
  return per_group(cm, [](const GroupCounts& c, const std::string& g) {
    return ratio(c.tp, c.actual, g, "true positive rate");
  });
}

std::map<std::string, double> predictive_equality(const ConfusionMatrix& cm) {
  return per_group(cm, [](const GroupCounts& c, const std::string& g) {
    return ratio(c.fp, c.negatives, g, "false positive rate");
  });
}

const GroupFairness* FairnessReport::find(std::string_view group) const {
  for (const auto& g : groups) {
    if (g.group == group) return &g;
  }
  return nullptr;
}

FairnessReport fairness_report(const ConfusionMatrix& cm, Task axis) {
  if (cm.total() == 0) throw EmptyEvaluationError("fairness metrics need a nonempty matrix");
  FairnessReport report;
  report.axis = axis;
  report.total = cm.total();
  for (std::size_t g = 0; g < cm.size(); ++g) {
    const std::string& name = cm.labels()[g];
    GroupFairness row;
    row.group = name;
    row.counts = counts_for(cm, g);
    row.dp_ratio = ratio(row.counts.predicted, row.counts.actual, name, "demographic parity");
    row.tpr = ratio(row.counts.tp, row.counts.actual, name, "true positive rate");
    row.fpr = ratio(row.counts.fp, row.counts.negatives, name, "false positive rate");
    report.groups.push_back(std::move(row));
  }
  return report;
}

double metric_value(const GroupFairness& group, std::string_view metric) {
  if (metric == "dp_ratio") return group.dp_ratio;
  if (metric == "tpr") return group.tpr;
  if (metric == "fpr") return group.fpr;
  throw SchemaError(fmt::format("unknown fairness metric '{}'", metric));
}

std::vector<ReferenceValue> reference_values_from_json(const nlohmann::json& j) {
  std::vector<ReferenceValue> out;
  if (!j.contains("fairness")) return out;
  try {
    for (const auto& item : j.at("fairness")) {
      ReferenceValue ref;
      auto axis = parse_task(item.at("axis").get<std::string>());
      if (!axis || *axis == Task::kTheme) {
        throw SchemaError(fmt::format("reference value has unknown axis {}", item.at("axis").dump()));
      }
      ref.axis = *axis;
      ref.group = item.at("group").get<std::string>();
      ref.metric = item.at("metric").get<std::string>();
      ref.value = item.at("value").get<double>();
      ref.decimals = item.value("decimals", 2);
      out.push_back(std::move(ref));
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(fmt::format("malformed reference values: {}", e.what()));
  }
  return out;
}

std::vector<ReferenceValue> load_reference_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open reference values {}", path.string()));
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return reference_values_from_json(j);
}

void annotate_divergences(FairnessReport& report, std::span<const ReferenceValue> references) {
  for (const auto& ref : references) {
    if (ref.axis != report.axis) continue;
    const GroupFairness* group = report.find(ref.group);
    if (group == nullptr) continue;
    const double computed = metric_value(*group, ref.metric);
    const double shown = round_half_up(computed, ref.decimals);
    const double half_ulp = 0.5 * std::pow(10.0, -ref.decimals);
    if (std::abs(shown - ref.value) < half_ulp) continue;

    std::string formula;
    const auto& c = group->counts;
    if (ref.metric == "dp_ratio") formula = fmt::format("{}/{}", c.predicted, c.actual);
    if (ref.metric == "tpr") formula = fmt::format("{}/{}", c.tp, c.actual);
    if (ref.metric == "fpr") formula = fmt::format("{}/{}", c.fp, c.negatives);
    report.divergences.push_back(Divergence{
        report.axis, ref.group, ref.metric, ref.value, computed, ref.decimals,
        fmt::format("reference {:.{}f} is not reproducible from the confusion counts; {} = {:.4f}",
                    ref.value, ref.decimals, formula, computed)});
  }
}

}  // namespace targetlens
