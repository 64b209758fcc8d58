#include <gtest/gtest.h>

#include "targetlens/error.hpp"
#include "targetlens/evaluator.hpp"

namespace targetlens {
namespace {

PredictionRecord rec(std::string id, Task task, std::optional<std::string> label) {
  PredictionRecord r;
  r.ad_id = std::move(id);
  r.task = task;
  r.predicted_label = std::move(label);
  r.parse_status = r.predicted_label ? ParseStatus::kParsed : ParseStatus::kUnparsed;
  return r;
}

const std::vector<std::string> kGender = {"female", "male"};

TEST(ConfusionMatrix, ConstructionValidates) {
  EXPECT_THROW(ConfusionMatrix({"a", "a"}), LabelSetError);
  EXPECT_THROW(ConfusionMatrix({"a", "b"}, {{1, 2}}), LabelSetError);
  EXPECT_THROW(ConfusionMatrix({"a", "b"}, {{1, 2}, {3}}), LabelSetError);
  EXPECT_THROW(ConfusionMatrix({"a", "b"}, {{1, -2}, {3, 4}}), LabelSetError);
  ConfusionMatrix cm({"a", "b"}, {{1, 2}, {3, 4}});
  EXPECT_EQ(cm.total(), 10);
  EXPECT_EQ(cm.trace(), 5);
  EXPECT_EQ(cm.row_sum(0), 3);
  EXPECT_EQ(cm.col_sum(0), 4);
  EXPECT_EQ(cm.index_of("b"), 1u);
  EXPECT_FALSE(cm.index_of("c").has_value());
}

TEST(ConfusionMatrix, PermutationReordersBothAxes) {
  ConfusionMatrix cm({"a", "b", "c"}, {{1, 2, 3}, {4, 5, 6}, {7, 8, 9}});
  const auto p = cm.permuted({"c", "a", "b"});
  EXPECT_EQ(p.counts(), (std::vector<std::vector<std::int64_t>>{{9, 7, 8}, {3, 1, 2}, {6, 4, 5}}));
  EXPECT_EQ(p.permuted({"a", "b", "c"}), cm);
  EXPECT_THROW(cm.permuted({"a", "b"}), LabelSetError);
}

TEST(ConfusionMatrix, TalliesParsedRecords) {
  TruthTable truth = {{"1", "female"}, {"2", "female"}, {"3", "male"}, {"4", "male"}};
  std::vector<PredictionRecord> records = {
      rec("1", Task::kGender, "female"), rec("2", Task::kGender, "male"),
      rec("3", Task::kGender, "male"), rec("4", Task::kGender, std::nullopt),
      rec("1", Task::kAge, "young")};
  const auto cm = confusion_matrix(records, Task::kGender, truth, kGender);
  EXPECT_EQ(cm.counts(), (std::vector<std::vector<std::int64_t>>{{1, 1}, {0, 1}}));
}

TEST(ConfusionMatrix, LabelErrors) {
  std::vector<PredictionRecord> records = {rec("1", Task::kGender, "female")};
  EXPECT_THROW(confusion_matrix(records, Task::kGender, {}, kGender), LabelSetError);
  EXPECT_THROW(confusion_matrix(records, Task::kGender, {{"1", "other"}}, kGender), LabelSetError);
  EXPECT_THROW(confusion_matrix(records, Task::kGender, {{"1", "female"}}, {"male"}),
               LabelSetError);
}

TEST(ClassificationReport, GenderFixtureMatrix) {
  const auto r = classification_report(ConfusionMatrix(kGender, {{56, 3}, {7, 40}}));
  const auto* f = r.find("female");
  ASSERT_NE(f, nullptr);
  EXPECT_DOUBLE_EQ(f->precision, 56.0 / 63.0);
  EXPECT_DOUBLE_EQ(f->recall, 56.0 / 59.0);
  EXPECT_EQ(f->support, 59);
  EXPECT_DOUBLE_EQ(r.accuracy, 96.0 / 106.0);
  EXPECT_EQ(r.total, 106);
  EXPECT_EQ(r.macro_avg.support, 106);
  EXPECT_NEAR(r.macro_avg.f1, 0.5 * (r.classes[0].f1 + r.classes[1].f1), 1e-15);
  EXPECT_NEAR(r.weighted_avg.recall, r.accuracy, 1e-15);
}

TEST(ClassificationReport, ZeroDenominatorsReportZero) {
  const auto r = classification_report(ConfusionMatrix({"a", "b", "c"},
                                                       {{3, 0, 0}, {2, 0, 0}, {0, 0, 0}}));
  EXPECT_EQ(r.find("b")->precision, 0.0);
  EXPECT_EQ(r.find("b")->f1, 0.0);
  EXPECT_EQ(r.find("c")->recall, 0.0);
  EXPECT_EQ(r.find("c")->support, 0);
  EXPECT_THROW(classification_report(ConfusionMatrix({"a", "b"})), EmptyEvaluationError);
}

TEST(Accuracy, BreakdownExcludesUnparsedByDefault) {
  std::map<Task, TruthTable> truth = {
      {Task::kGender, {{"1", "female"}, {"2", "female"}, {"3", "male"}}},
      {Task::kAge, {{"1", "senior"}}}};
  std::vector<PredictionRecord> records = {
      rec("1", Task::kGender, "female"), rec("2", Task::kGender, "male"),
      rec("3", Task::kGender, std::nullopt), rec("1", Task::kAge, "young")};
  const auto b = accuracy_breakdown(records, truth);
  const auto* female = b.find("female");
  ASSERT_NE(female, nullptr);
  EXPECT_EQ(female->total, 2);
  EXPECT_EQ(female->correct, 1);
  EXPECT_EQ(female->misclassified.at("male"), 1);
  const auto* male = b.find("male");
  EXPECT_EQ(male->total, 0);
  EXPECT_EQ(male->unparsed, 1);
  EXPECT_EQ(b.find("senior")->misclassified.at("young"), 1);
  EXPECT_EQ(b.all.total, 3);
  EXPECT_EQ(b.all.correct, 1);
  EXPECT_EQ(b.all.unparsed, 1);
  EXPECT_EQ(b.groups.size(), 3u);  // groups with ground truth only

  const auto strict = accuracy_breakdown(records, truth, UnparsedPolicy::kStrict);
  EXPECT_EQ(strict.find("male")->total, 1);
  EXPECT_EQ(strict.find("male")->misclassified.at("unparsed"), 1);
  EXPECT_EQ(strict.all.total, 4);
  EXPECT_DOUBLE_EQ(strict.all.accuracy, 0.25);
}

TEST(Rounding, HalfUpOnExactDecimalExpansion) {
  EXPECT_EQ(round_half_up(0.125, 2), 0.13);  // exactly representable tie
  EXPECT_EQ(round_half_up(0.375, 2), 0.38);
  EXPECT_EQ(round_half_up(2.675, 2), 2.67);  // stored below the tie
  EXPECT_EQ(round_half_up(0.9249999999999999, 2), 0.92);
  EXPECT_EQ(round_half_up(96.0 / 106.0, 4), 0.9057);
  EXPECT_EQ(round_half_up(0.995, 2), 0.99);
  EXPECT_EQ(round_half_up(0.9951, 2), 1.0);
  EXPECT_EQ(round_half_up(1.5, 0), 2.0);
  EXPECT_EQ(round_half_up(0.0, 3), 0.0);
}

}  // namespace
}  // namespace targetlens
