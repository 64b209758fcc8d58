#include <gtest/gtest.h>

#include <sstream>

#include "targetlens/corpus.hpp"
#include "targetlens/error.hpp"
#include "test_support.hpp"

namespace targetlens {
namespace {

using testing::make_ad;

const char* kHeader =
    "ad_id,title,description,body,funding_entity,spend.lower,spend.upper,impressions.lower,"
    "impressions.upper,gender.male,gender.female,gender.unknown,age.13-17,age.18-24,age.25-34,"
    "age.35-44,age.45-54,age.55-64,age.65+\n";

template <typename Fn>
ParseError capture_parse_error(Fn&& fn) {
  try {
    fn();
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "expected ParseError";
  return ParseError(0, "", "");
}

TEST(Corpus, JsonlRoundTrip) {
  std::vector<AdRecord> ads = {make_ad("a1", "Solar jobs now"),
                               make_ad("a2", "Lower bills, \"cleaner\" air", 0.0, AgeBand::k65Plus)};
  ads[1].title = "Title, with comma";
  ads[1].age_impressions[AgeBand::k13To17] = 0.0;
  std::stringstream ss;
  write_corpus(ss, ads, CorpusFormat::kJsonl);
  EXPECT_EQ(parse_corpus(ss, CorpusFormat::kJsonl), ads);
}

TEST(Corpus, CsvRoundTripWithQuoting) {
  std::vector<AdRecord> ads = {make_ad("a1", "Line one\nline \"two\", three")};
  ads[0].description = "desc";
  std::stringstream ss;
  write_corpus(ss, ads, CorpusFormat::kCsv);
  EXPECT_EQ(parse_corpus(ss, CorpusFormat::kCsv), ads);
}

TEST(Corpus, CsvPointValuesBecomeDegenerateRanges) {
  std::stringstream ss(
      "ad_id,body,title,description,funding_entity,spend,impressions,gender.male,gender.female,"
      "gender.unknown,age.65+\n"
      "x,hello,,,F,250,1000,0,40,0,40\n");
  auto ads = parse_corpus(ss, CorpusFormat::kCsv);
  ASSERT_EQ(ads.size(), 1u);
  EXPECT_EQ(ads[0].spend, (Range{250, 250}));
  EXPECT_DOUBLE_EQ(ads[0].gender_impressions.female, 40);
}

TEST(Corpus, MalformedJsonReportsRow) {
  std::stringstream ss;
  write_corpus(ss, std::vector<AdRecord>{make_ad("a1", "ok")}, CorpusFormat::kJsonl);
  ss << "{not json\n";
  auto e = capture_parse_error([&] { parse_corpus(ss, CorpusFormat::kJsonl); });
  EXPECT_EQ(e.row(), 2u);
  EXPECT_EQ(e.field(), "<row>");
}

TEST(Corpus, MissingJsonFieldNamesTheField) {
  auto j = to_json(make_ad("a1", "ok"));
  j.erase("spend");
  std::stringstream ss(j.dump() + "\n");
  auto e = capture_parse_error([&] { parse_corpus(ss, CorpusFormat::kJsonl); });
  EXPECT_EQ(e.row(), 1u);
  EXPECT_EQ(e.field(), "spend");
}

TEST(Corpus, UnknownAgeBandIsRejected) {
  auto j = to_json(make_ad("a1", "ok"));
  j["age_impressions"]["70-80"] = 0.5;
  std::stringstream ss(j.dump() + "\n");
  auto e = capture_parse_error([&] { parse_corpus(ss, CorpusFormat::kJsonl); });
  EXPECT_EQ(e.field(), "age_impressions");
}

TEST(Corpus, CsvMissingValueReportsRowAndField) {
  std::stringstream ss(std::string(kHeader) +
                       "a1,,,body,F,1,2,3,4,0,1,0,,,1,,,,\n"
                       "a2,,,body,F,1,2,3,4,,1,0,,,1,,,,\n");
  auto e = capture_parse_error([&] { parse_corpus(ss, CorpusFormat::kCsv); });
  EXPECT_EQ(e.row(), 2u);
  EXPECT_EQ(e.field(), "gender.male");
}

TEST(Corpus, CsvMissingColumn) {
  std::stringstream ss("ad_id,body\na1,hello\n");
  auto e = capture_parse_error([&] { parse_corpus(ss, CorpusFormat::kCsv); });
  EXPECT_EQ(e.row(), 1u);
  EXPECT_EQ(e.field(), "title");
}

TEST(Corpus, CsvUnterminatedQuote) {
  std::stringstream ss(std::string(kHeader) + "a1,,,\"open body,F,1,2,3,4,0,1,0,,,1,,,,\n");
  EXPECT_THROW(parse_corpus(ss, CorpusFormat::kCsv), ParseError);
}

TEST(Corpus, DuplicateIds) {
  std::stringstream ss;
  write_corpus(ss, std::vector<AdRecord>{make_ad("dup", "one"), make_ad("dup", "two")},
               CorpusFormat::kJsonl);
  EXPECT_THROW(parse_corpus(ss, CorpusFormat::kJsonl), DuplicateIdError);
}

TEST(Corpus, FractionalSharesMustSumToOne) {
  auto ad = make_ad("a1", "text");
  ad.gender_impressions = {0.3, 0.3, 0.0};
  try {
    validate_ad(ad);
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("sum"), std::string::npos);
  }
  ad.gender_impressions = {30, 30, 0};  // counts carry no sum constraint
  EXPECT_NO_THROW(validate_ad(ad));
  ad.gender_impressions = {-1, 2, 0};
  EXPECT_THROW(validate_ad(ad), SchemaError);
}

TEST(Corpus, AdInvariants) {
  auto ad = make_ad("", "text");
  EXPECT_THROW(validate_ad(ad), SchemaError);
  ad = make_ad("a1", "");
  EXPECT_THROW(validate_ad(ad), SchemaError);
  ad = make_ad("a1", "text");
  ad.spend = {10, 5};
  EXPECT_THROW(validate_ad(ad), SchemaError);
}

TEST(Corpus, BucketSharesDropMinorsAndRenormalize) {
  AgeImpressions bands = {{AgeBand::k13To17, 0.2},
                          {AgeBand::k25To34, 0.4},
                          {AgeBand::k35To44, 0.4}};
  auto shares = bucket_age_shares(bands);
  ASSERT_EQ(shares.size(), 1u);
  EXPECT_DOUBLE_EQ(shares.at(AgeBucket::kEarlyWorking), 1.0);
  EXPECT_TRUE(bucket_age_shares(AgeImpressions{{AgeBand::k13To17, 1.0}}).empty());
  EXPECT_THROW(bucket_age_shares(std::map<std::string, double>{{"90+", 1.0}}), SchemaError);
}

TEST(Corpus, DeriveTargetsAtFullExclusivity) {
  auto ad = make_ad("a1", "text", 1.0, AgeBand::k18To24);
  ad.gender_impressions.unknown = 0.0;
  auto labeled = derive_targets(ad);
  EXPECT_EQ(labeled.gender_target, Gender::kFemale);
  EXPECT_EQ(labeled.age_target, AgeBucket::kYoung);
  EXPECT_EQ(labeled.target_key(Task::kAge), "young");

  // Unknown impressions are not attributable to either gender.
  ad.gender_impressions = {0.0, 0.9, 0.1};
  EXPECT_EQ(derive_targets(ad).gender_target, Gender::kFemale);

  ad.gender_impressions = {0.05, 0.95, 0.0};
  EXPECT_FALSE(derive_targets(ad).gender_target.has_value());
  EXPECT_EQ(derive_targets(ad, 0.9).gender_target, Gender::kFemale);
}

TEST(Corpus, DeriveTargetsThresholdRange) {
  auto ad = make_ad("a1", "text");
  EXPECT_THROW(derive_targets(ad, 0.5), ParameterError);
  EXPECT_THROW(derive_targets(ad, 1.01), ParameterError);
  EXPECT_NO_THROW(derive_targets(ad, 0.51));
}

TEST(Corpus, MixedAgeAudienceHasNoAgeTarget) {
  auto ad = make_ad("a1", "text");
  ad.age_impressions = {{AgeBand::k18To24, 0.5}, {AgeBand::k65Plus, 0.5}};
  EXPECT_FALSE(derive_targets(ad).age_target.has_value());
}

TEST(Corpus, AdTextJoinsNonemptyFields) {
  auto ad = make_ad("a1", "body");
  ad.title = "title";
  EXPECT_EQ(ad_text(ad), "title\nbody");
  EXPECT_EQ(ad_text(ad, {false, true, true}), "body");
}

TEST(Corpus, DigestIsStableAndOrderSensitive) {
  std::vector<AdRecord> ads = {make_ad("a1", "x"), make_ad("a2", "y")};
  const auto d = corpus_digest(ads);
  EXPECT_EQ(d.size(), 64u);
  EXPECT_EQ(d, corpus_digest(ads));
  std::swap(ads[0], ads[1]);
  EXPECT_NE(d, corpus_digest(ads));
}

TEST(Corpus, LabeledRoundTripAndSummary) {
  auto labeled = derive_targets(std::vector<AdRecord>{
      make_ad("a1", "x", 1.0), make_ad("a2", "y", 0.0, AgeBand::k65Plus)});
  for (const auto& ad : labeled) EXPECT_EQ(labeled_ad_from_json(to_json(ad)), ad);
  auto summary = summarize(labeled);
  EXPECT_EQ(summary.total_ads, 2u);
  EXPECT_EQ(summary.gender_targets.at("female"), 1u);
  EXPECT_EQ(summary.gender_targets.at("male"), 1u);
  EXPECT_EQ(summary.age_targets.at("senior"), 1u);
  EXPECT_EQ(summary.targeted_ads, 2u);
}

TEST(Corpus, FixtureLoads) {
  auto ads = load_corpus(testing::fixture_dir() / "corpus.jsonl", CorpusFormat::kJsonl);
  EXPECT_GT(ads.size(), 200u);
  EXPECT_THROW(load_corpus("/nonexistent/corpus.jsonl", CorpusFormat::kJsonl), ConfigError);
}

}  // namespace
}  // namespace targetlens
