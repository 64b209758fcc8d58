#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "targetlens/corpus.hpp"
#include "targetlens/runner.hpp"

namespace targetlens {

// Square count matrix over an ordered label set. Rows are actual classes,
// columns predicted classes.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::vector<std::string> labels);
  // Throws LabelSetError unless `counts` is |labels| x |labels| and nonnegative.
  ConfusionMatrix(std::vector<std::string> labels, std::vector<std::vector<std::int64_t>> counts);

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::vector<std::int64_t>>& counts() const noexcept { return counts_; }

  std::int64_t at(std::size_t actual, std::size_t predicted) const {
    return counts_.at(actual).at(predicted);
  }
  void add(std::size_t actual, std::size_t predicted, std::int64_t n = 1);

  std::optional<std::size_t> index_of(std::string_view label) const;

  std::int64_t total() const noexcept;
  std::int64_t trace() const noexcept;
  std::int64_t row_sum(std::size_t i) const;
  std::int64_t col_sum(std::size_t j) const;

  // Same matrix with rows and columns reordered to `order` (a permutation of labels()).
  ConfusionMatrix permuted(const std::vector<std::string>& order) const;

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::vector<std::string> labels_;
  std::vector<std::vector<std::int64_t>> counts_;
};

// Ground truth for one task: ad_id -> label key.
using TruthTable = std::map<std::string, std::string>;

TruthTable truth_for(std::span<const LabeledAd> ads, Task task);

// How Unparsed predictions enter accuracy figures. kExclude drops them (and
// the caller warns); kStrict counts them as wrong.
enum class UnparsedPolicy { kExclude, kStrict };

// Tallies Parsed records of `task`. Throws LabelSetError when a truth or
// predicted label falls outside `labels`, or a parsed record has no truth.
ConfusionMatrix confusion_matrix(std::span<const PredictionRecord> records, Task task,
                                 const TruthTable& truth, const std::vector<std::string>& labels);

struct ClassMetrics {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::int64_t support = 0;

  bool operator==(const ClassMetrics&) const = default;
};

struct AverageMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::int64_t support = 0;

  bool operator==(const AverageMetrics&) const = default;
};

// Undefined ratios (zero column or row) are reported as 0.
struct ClassificationReport {
  std::vector<ClassMetrics> classes;  // in matrix label order
  double accuracy = 0.0;
  std::int64_t total = 0;
  AverageMetrics macro_avg;     // unweighted mean over classes
  AverageMetrics weighted_avg;  // support-weighted mean

  const ClassMetrics* find(std::string_view label) const;
  bool operator==(const ClassificationReport&) const = default;
};

// Throws EmptyEvaluationError when cm.total() == 0.
ClassificationReport classification_report(const ConfusionMatrix& cm);

struct AccuracyRow {
  std::string group;  // label key, or "all"
  std::optional<Task> task;  // empty for the "all" row
  std::int64_t total = 0;
  std::int64_t correct = 0;
  double accuracy = 0.0;  // fraction in [0, 1]
  std::map<std::string, std::int64_t> misclassified;  // predicted label -> count
  std::int64_t unparsed = 0;

  bool operator==(const AccuracyRow&) const = default;
};

struct AccuracyBreakdown {
  std::vector<AccuracyRow> groups;  // per task, in label order
  AccuracyRow all;

  const AccuracyRow* find(std::string_view group) const;
  bool operator==(const AccuracyBreakdown&) const = default;
};

// One row per ground-truth group of every task present in `truth`, plus an
// "all" row across tasks. Under kExclude, unparsed records are counted in
// `unparsed` but not in `total`; under kStrict they count as wrong.
AccuracyBreakdown accuracy_breakdown(std::span<const PredictionRecord> records,
                                     const std::map<Task, TruthTable>& truth,
                                     UnparsedPolicy policy = UnparsedPolicy::kExclude);

// Half-up rounding used for display tables.
double round_half_up(double value, int decimals);

}  // namespace targetlens
