#include <gtest/gtest.h>

#include "targetlens/error.hpp"
#include "targetlens/thematics.hpp"

namespace targetlens {
namespace {

PredictionRecord rec(std::string id, Task task, std::string label, std::string explanation) {
  PredictionRecord r;
  r.ad_id = std::move(id);
  r.task = task;
  r.predicted_label = std::move(label);
  r.explanation = std::move(explanation);
  r.parse_status = ParseStatus::kParsed;
  return r;
}

TEST(Thematics, CollectsCorrectExplanationsInIdOrder) {
  TruthTable truth = {{"a", "female"}, {"b", "female"}, {"c", "male"}, {"d", "female"}};
  std::vector<PredictionRecord> records = {
      rec("d", Task::kGender, "female", "D"), rec("a", Task::kGender, "female", "A"),
      rec("b", Task::kGender, "male", "wrong"), rec("c", Task::kGender, "female", "wrong"),
      rec("a", Task::kAge, "female", "other task")};
  PredictionRecord unparsed;
  unparsed.ad_id = "b";
  unparsed.task = Task::kGender;
  unparsed.explanation = "no label";
  records.push_back(unparsed);
  EXPECT_EQ(collect_explanations(records, Task::kGender, truth, "female"),
            (std::vector<std::string>{"A", "D"}));
  EXPECT_TRUE(collect_explanations(records, Task::kGender, truth, "male").empty());
}

TEST(Thematics, PackingAndAudience) {
  std::vector<std::string> items = {"first", "second"};
  EXPECT_EQ(pack_explanations(items), "1. first\n2. second");
  EXPECT_EQ(audience_phrase("senior"), "senior citizens (65+)");
  EXPECT_EQ(audience_phrase("male"), "male");
}

TEST(Thematics, ParsesEveryBulletStyle) {
  const std::string raw =
      "Here you go.\n"
      "Theme: Caring Futures\n"
      "Aspects:\n"
      "- Parenting: kids first\n"
      "* Health\n"
      "\xE2\x80\xA2 Community: local support\n"
      "1. Climate: future generations\n"
      "2) Safety: homes\n";
  const auto [theme, aspects] = parse_theme_response(raw);
  EXPECT_EQ(theme, "Caring Futures");
  ASSERT_EQ(aspects.size(), 5u);
  EXPECT_EQ(aspects[0], (Aspect{"Parenting", "kids first"}));
  EXPECT_EQ(aspects[1], (Aspect{"Health", ""}));
  EXPECT_EQ(aspects[2].name, "Community");
  EXPECT_EQ(aspects[3], (Aspect{"Climate", "future generations"}));
  EXPECT_EQ(aspects[4].name, "Safety");
}

TEST(Thematics, ParseFailuresKeepRawText) {
  try {
    parse_theme_response("Aspects:\n- a: b\n");
    FAIL();
  } catch (const ThemeParseError& e) {
    EXPECT_EQ(e.raw_text(), "Aspects:\n- a: b\n");
  }
  EXPECT_THROW(parse_theme_response("Theme: t\n"), ThemeParseError);
  EXPECT_THROW(parse_theme_response("Theme: t\nAspects:\n"), ThemeParseError);
}

TEST(Thematics, SynthesisThroughAProvider) {
  const auto spec = default_theme_spec();
  std::vector<std::string> explanations = {"mentions grandchildren", "medicare"};
  const auto request = theme_request(explanations, "senior", spec, "m");
  EXPECT_NE(request.prompt.find("1. mentions grandchildren\n2. medicare"), std::string::npos);
  EXPECT_NE(request.prompt.find("senior citizens (65+)"), std::string::npos);

  MockProvider mock({}, "Theme: Health and Safety Concerns\nAspects:\n- Wellness: programs\n");
  const auto themes = synthesize_themes(explanations, "senior", Task::kAge, mock, spec, "m");
  EXPECT_EQ(themes.theme, "Health and Safety Concerns");
  EXPECT_EQ(themes.group, "senior");
  EXPECT_EQ(themes.source_count, 2u);
  EXPECT_EQ(themes.provider, "mock");
  EXPECT_EQ(themes.request_hash, request_hash(request));
  EXPECT_EQ(theme_set_from_json(to_json(themes)), themes);

  EXPECT_THROW(synthesize_themes({}, "senior", Task::kAge, mock, spec, "m"), InputError);
  EXPECT_THROW(theme_request(explanations, "senior", default_age_spec(), "m"), ConfigError);
  MockProvider garbage({}, "no structure here");
  EXPECT_THROW(synthesize_themes(explanations, "senior", Task::kAge, garbage, spec, "m"),
               ThemeParseError);
}

}  // namespace
}  // namespace targetlens
