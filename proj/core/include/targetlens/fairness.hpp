#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "targetlens/evaluator.hpp"
#include "targetlens/labels.hpp"

namespace targetlens {

// All three metrics are one-vs-rest per group g of the matrix:
//   dp(g)  = colsum(g) / rowsum(g)
//   tpr(g) = cm[g][g] / rowsum(g)
//   fpr(g) = (colsum(g) - cm[g][g]) / (total - rowsum(g))
// A vanishing denominator raises UndefinedGroupError naming the group.
std::map<std::string, double> demographic_parity(const ConfusionMatrix& cm);
std::map<std::string, double> equal_opportunity(const ConfusionMatrix& cm);
std::map<std::string, double> predictive_equality(const ConfusionMatrix& cm);

struct GroupCounts {
  std::int64_t actual = 0;
  std::int64_t predicted = 0;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t negatives = 0;

  bool operator==(const GroupCounts&) const = default;
};

struct GroupFairness {
  std::string group;
  double dp_ratio = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
  GroupCounts counts;

  bool operator==(const GroupFairness&) const = default;
};

// A reference figure that the computed metric does not reproduce.
struct Divergence {
  Task axis = Task::kGender;
  std::string group;
  std::string metric;  // "dp_ratio" | "tpr" | "fpr"
  double reference = 0.0;
  double computed = 0.0;
  int decimals = 2;
  std::string note;

  bool operator==(const Divergence&) const = default;
};

struct FairnessReport {
  Task axis = Task::kGender;
  std::vector<GroupFairness> groups;  // in matrix label order
  std::int64_t total = 0;
  std::vector<Divergence> divergences;

  const GroupFairness* find(std::string_view group) const;
  bool operator==(const FairnessReport&) const = default;
};

// Throws EmptyEvaluationError on an all-zero matrix.
FairnessReport fairness_report(const ConfusionMatrix& cm, Task axis);

// Reference metric values to check computed reports against.
struct ReferenceValue {
  Task axis = Task::kGender;
  std::string group;
  std::string metric;
  double value = 0.0;
  int decimals = 2;  // precision the value was reported at

  bool operator==(const ReferenceValue&) const = default;
};

// Reads the "fairness" array of a reference-values JSON document.
std::vector<ReferenceValue> reference_values_from_json(const nlohmann::json& j);
std::vector<ReferenceValue> load_reference_values(const std::filesystem::path& path);

// Appends a Divergence for every reference value of `report.axis` that the
// computed metric, rounded half-up to the reference's precision, misses.
void annotate_divergences(FairnessReport& report, std::span<const ReferenceValue> references);

double metric_value(const GroupFairness& group, std::string_view metric);

}  // namespace targetlens
