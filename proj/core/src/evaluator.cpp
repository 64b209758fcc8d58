#include "targetlens/evaluator.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <set>

#include <fmt/format.h>

#include "targetlens/error.hpp"

namespace targetlens {

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> labels)
    : labels_(std::move(labels)),
      counts_(labels_.size(), std::vector<std::int64_t>(labels_.size(), 0)) {
  if (std::set<std::string>(labels_.begin(), labels_.end()).size() != labels_.size()) {
    throw LabelSetError("confusion matrix labels must be unique");
  }
}

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> labels,
                                 std::vector<std::vector<std::int64_t>> counts)
    : ConfusionMatrix(std::move(labels)) {
  if (counts.size() != labels_.size()) throw LabelSetError("confusion matrix must be square");
  for (const auto& row : counts) {
    if (row.size() != labels_.size()) throw LabelSetError("confusion matrix must be square");
    for (auto c : row) {
      if (c < 0) throw LabelSetError("confusion matrix counts must be nonnegative");
    }
  }
  counts_ = std::move(counts);
}

void ConfusionMatrix::add(std::size_t actual, std::size_t predicted, std::int64_t n) {
  counts_.at(actual).at(predicted) += n;
}

std::optional<std::size_t> ConfusionMatrix::index_of(std::string_view label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

std::int64_t ConfusionMatrix::total() const noexcept {
  std::int64_t sum = 0;
  for (const auto& row : counts_) {
    for (auto c : row) sum += c;
  }
  return sum;
}

std::int64_t ConfusionMatrix::trace() const noexcept {
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < counts_.size(); ++i) sum += counts_[i][i];
  return sum;
}

std::int64_t ConfusionMatrix::row_sum(std::size_t i) const {
  std::int64_t sum = 0;
  for (auto c : counts_.at(i)) sum += c;
  return sum;
}

std::int64_t ConfusionMatrix::col_sum(std::size_t j) const {
  std::int64_t sum = 0;
  for (const auto& row : counts_) sum += row.at(j);
  return sum;
}

ConfusionMatrix ConfusionMatrix::permuted(const std::vector<std::string>& order) const {
  if (order.size() != labels_.size()) throw LabelSetError("permutation size mismatch");
  std::vector<std::size_t> source;
  for (const auto& label : order) {
    auto idx = index_of(label);
    if (!idx) throw LabelSetError(fmt::format("label '{}' not in matrix", label));
    source.push_back(*idx);
  }
  ConfusionMatrix out(order);
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = 0; j < order.size(); ++j) out.counts_[i][j] = at(source[i], source[j]);
  }
  return out;
}

TruthTable truth_for(std::span<const LabeledAd> ads, Task task) {
  TruthTable truth;
  for (const auto& ad : ads) {
    if (auto target = ad.target_key(task)) truth.emplace(ad.ad.ad_id, *target);
  }
  return truth;
}

ConfusionMatrix confusion_matrix(std::span<const PredictionRecord> records, Task task,
                                 const TruthTable& truth, const std::vector<std::string>& labels) {
  ConfusionMatrix cm(labels);
  for (const auto& [ad_id, label] : truth) {
    if (!cm.index_of(label)) {
      throw LabelSetError(fmt::format("truth label '{}' of ad {} is outside the label set",
                                      label, ad_id));
    }
  }
  for (const auto& record : records) {
    if (record.task != task || !record.parsed()) continue;
    auto it = truth.find(record.ad_id);
    if (it == truth.end()) {
      throw LabelSetError(fmt::format("ad {} has a {} prediction but no ground truth",
                                      record.ad_id, key(task)));
    }
    auto predicted = cm.index_of(*record.predicted_label);
    if (!predicted) {
      throw LabelSetError(fmt::format("predicted label '{}' of ad {} is outside the label set",
                                      *record.predicted_label, record.ad_id));
    }
    cm.add(*cm.index_of(it->second), *predicted);
  }
  return cm;
}

const ClassMetrics* ClassificationReport::find(std::string_view label) const {
  for (const auto& c : classes) {
    if (c.label == label) return &c;
  }
  return nullptr;
}

ClassificationReport classification_report(const ConfusionMatrix& cm) {
  const std::int64_t total = cm.total();
  if (total == 0) throw EmptyEvaluationError("cannot report on an empty confusion matrix");

  auto ratio = [](std::int64_t num, std::int64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };

  ClassificationReport report;
  report.total = total;
  report.accuracy = ratio(cm.trace(), total);
  const double n_classes = static_cast<double>(cm.size());
  for (std::size_t g = 0; g < cm.size(); ++g) {
    ClassMetrics m;
    m.label = cm.labels()[g];
    m.support = cm.row_sum(g);
    m.precision = ratio(cm.at(g, g), cm.col_sum(g));
    m.recall = ratio(cm.at(g, g), m.support);
    const double pr = m.precision + m.recall;
    m.f1 = pr == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / pr;

    report.macro_avg.precision += m.precision / n_classes;
    report.macro_avg.recall += m.recall / n_classes;
    report.macro_avg.f1 += m.f1 / n_classes;
    const double weight = static_cast<double>(m.support) / static_cast<double>(total);
    report.weighted_avg.precision += m.precision * weight;
    report.weighted_avg.recall += m.recall * weight;
    report.weighted_avg.f1 += m.f1 * weight;
    report.classes.push_back(std::move(m));
  }
  report.macro_avg.support = total;
  report.weighted_avg.support = total;
  return report;
}

const AccuracyRow* AccuracyBreakdown::find(std::string_view group) const {
  if (group == all.group) return &all;
  for (const auto& row : groups) {
    if (row.group == group) return &row;
  }
  return nullptr;
}

AccuracyBreakdown accuracy_breakdown(std::span<const PredictionRecord> records,
                                     const std::map<Task, TruthTable>& truth,
                                     UnparsedPolicy policy) {
  AccuracyBreakdown out;
  out.all.group = "all";

  for (const auto& [task, table] : truth) {
    const auto labels = label_keys(task);
    std::map<std::string, AccuracyRow> rows;
    for (const auto& label : labels) rows[label] = AccuracyRow{label, task, 0, 0, 0.0, {}, 0};

    for (const auto& record : records) {
      if (record.task != task) continue;
      auto it = table.find(record.ad_id);
      if (it == table.end()) {
        throw LabelSetError(fmt::format("ad {} has a {} prediction but no ground truth",
                                        record.ad_id, key(task)));
      }
      auto row_it = rows.find(it->second);
      if (row_it == rows.end()) {
        throw LabelSetError(fmt::format("truth label '{}' is outside the {} label set",
                                        it->second, key(task)));
      }
      AccuracyRow& row = row_it->second;
      if (!record.parsed()) {
        ++row.unparsed;
        if (policy == UnparsedPolicy::kStrict) {
          ++row.total;
          ++row.misclassified["unparsed"];
        }
        continue;
      }
      ++row.total;
      if (*record.predicted_label == it->second) {
        ++row.correct;
      } else {
        ++row.misclassified[*record.predicted_label];
      }
    }

    for (const auto& label : labels) {
      AccuracyRow& row = rows[label];
      if (row.total == 0 && row.unparsed == 0) continue;
      row.accuracy = row.total == 0 ? 0.0
                                    : static_cast<double>(row.correct) /
                                          static_cast<double>(row.total);
      out.all.total += row.total;
      out.all.correct += row.correct;
      out.all.unparsed += row.unparsed;
      out.groups.push_back(std::move(row));
    }
  }
  out.all.accuracy = out.all.total == 0 ? 0.0
                                        : static_cast<double>(out.all.correct) /
                                              static_cast<double>(out.all.total);
  return out;
}

double round_half_up(double value, int decimals) {
  if (!std::isfinite(value) || decimals < 0) return value;
  // Decide on the exact decimal expansion of the stored double, so a value
  // such as 0.9249999999999999 stays below the tie.
  std::array<char, 512> buf{};
  const double magnitude = std::abs(value);
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), magnitude,
                                 std::chars_format::fixed, decimals + 40);
  if (ec != std::errc()) return value;
  std::string digits(buf.data(), end);
  const auto dot = digits.find('.');
  const bool up = digits[dot + 1 + static_cast<std::size_t>(decimals)] >= '5';
  std::string kept = digits.substr(0, dot + 1 + static_cast<std::size_t>(decimals));
  if (up) {
    // Decimal carry, right to left, skipping the point.
    std::size_t i = kept.size();
    while (i-- > 0) {
      if (kept[i] == '.') continue;
      if (kept[i] != '9') {
        ++kept[i];
        break;
      }
      kept[i] = '0';
      if (i == 0) kept.insert(kept.begin(), '1');
    }
  }
  const double rounded = std::strtod(kept.c_str(), nullptr);
  return std::signbit(value) ? -rounded : rounded;
}

}  // namespace targetlens
