#include <gtest/gtest.h>

#include "targetlens/error.hpp"
#include "targetlens/fairness.hpp"
#include "test_support.hpp"

namespace targetlens {
namespace {

ConfusionMatrix gender_matrix() { return ConfusionMatrix({"female", "male"}, {{56, 3}, {7, 40}}); }

ConfusionMatrix age_matrix() {
  return ConfusionMatrix({"young", "early_working", "late_working", "senior"},
                         {{22, 2, 1, 0}, {4, 74, 4, 0}, {0, 2, 6, 0}, {3, 0, 1, 2}});
}

TEST(Fairness, MetricsFollowTheirDefinitions) {
  const auto cm = gender_matrix();
  const auto dp = demographic_parity(cm);
  EXPECT_DOUBLE_EQ(dp.at("female"), 63.0 / 59.0);
  EXPECT_DOUBLE_EQ(dp.at("male"), 43.0 / 47.0);
  const auto tpr = equal_opportunity(cm);
  EXPECT_DOUBLE_EQ(tpr.at("female"), 56.0 / 59.0);
  const auto fpr = predictive_equality(cm);
  EXPECT_DOUBLE_EQ(fpr.at("female"), 7.0 / 47.0);
  EXPECT_DOUBLE_EQ(fpr.at("male"), 3.0 / 59.0);
}

TEST(Fairness, ReportCarriesCounts) {
  const auto report = fairness_report(age_matrix(), Task::kAge);
  EXPECT_EQ(report.total, 121);
  const auto* senior = report.find("senior");
  ASSERT_NE(senior, nullptr);
  EXPECT_EQ(senior->counts, (GroupCounts{6, 2, 2, 0, 115}));
  EXPECT_DOUBLE_EQ(senior->dp_ratio, 2.0 / 6.0);
  EXPECT_EQ(report.find("nobody"), nullptr);
  EXPECT_DOUBLE_EQ(metric_value(*senior, "tpr"), 2.0 / 6.0);
  EXPECT_THROW(metric_value(*senior, "auc"), SchemaError);
}

TEST(Fairness, UndefinedGroupNamesTheGroup) {
  ConfusionMatrix cm({"a", "b"}, {{5, 1}, {0, 0}});
  try {
    demographic_parity(cm);
    FAIL();
  } catch (const UndefinedGroupError& e) {
    EXPECT_EQ(e.group(), "b");
  }
  EXPECT_THROW(equal_opportunity(cm), UndefinedGroupError);
  EXPECT_THROW(predictive_equality(ConfusionMatrix({"a", "b"}, {{0, 0}, {5, 0}})),
               UndefinedGroupError);
  EXPECT_THROW(fairness_report(ConfusionMatrix({"a", "b"}), Task::kGender), EmptyEvaluationError);
}

TEST(Fairness, DivergenceAnnotation) {
  auto report = fairness_report(gender_matrix(), Task::kGender);
  std::vector<ReferenceValue> refs = {
      {Task::kGender, "female", "fpr", 0.07, 2},
      {Task::kGender, "male", "fpr", 0.05, 2},
      {Task::kGender, "female", "dp_ratio", 1.0678, 4},
      {Task::kAge, "senior", "tpr", 0.99, 2},  // other axis: ignored
  };
  annotate_divergences(report, refs);
  ASSERT_EQ(report.divergences.size(), 1u);
  const auto& d = report.divergences[0];
  EXPECT_EQ(d.group, "female");
  EXPECT_EQ(d.metric, "fpr");
  EXPECT_DOUBLE_EQ(d.reference, 0.07);
  EXPECT_DOUBLE_EQ(d.computed, 7.0 / 47.0);
  EXPECT_NE(d.note.find("7/47"), std::string::npos);
}

TEST(Fairness, ReferenceValuesParse) {
  const auto refs = reference_values_from_json(nlohmann::json::parse(
      R"({"fairness": [{"axis": "age", "group": "senior", "metric": "dp_ratio",
                        "value": 0.33, "decimals": 2}]})"));
  ASSERT_EQ(refs.size(), 1u);
  EXPECT_EQ(refs[0], (ReferenceValue{Task::kAge, "senior", "dp_ratio", 0.33, 2}));
  const auto fixture = load_reference_values(testing::fixture_dir() / "reference_values.json");
  EXPECT_EQ(fixture.size(), 18u);
  EXPECT_THROW(load_reference_values("/nonexistent.json"), ConfigError);
}

}  // namespace
}  // namespace targetlens
