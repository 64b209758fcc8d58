#include <gtest/gtest.h>

#include "targetlens/labels.hpp"

namespace targetlens {
namespace {

TEST(Labels, KeysAndDisplayNames) {
  EXPECT_EQ(key(Gender::kFemale), "female");
  EXPECT_EQ(key(AgeBucket::kEarlyWorking), "early_working");
  EXPECT_EQ(display_name(AgeBucket::kEarlyWorking), "Early Working");
  EXPECT_EQ(display_name(Gender::kMale), "Male");
  EXPECT_EQ(key(Task::kTheme), "theme");
}

TEST(Labels, ParsingAcceptsKeysAndDisplayNamesCaseInsensitively) {
  EXPECT_EQ(parse_gender("FEMALE"), Gender::kFemale);
  EXPECT_EQ(parse_age_bucket("late working"), AgeBucket::kLateWorking);
  EXPECT_EQ(parse_age_bucket("late_working"), AgeBucket::kLateWorking);
  EXPECT_EQ(parse_task("Age"), Task::kAge);
  EXPECT_FALSE(parse_gender("nonbinary").has_value());
  EXPECT_FALSE(parse_age_bucket("teen").has_value());
}

TEST(Labels, BandsMapToBuckets) {
  EXPECT_FALSE(bucket_of(AgeBand::k13To17).has_value());
  EXPECT_EQ(bucket_of(AgeBand::k18To24), AgeBucket::kYoung);
  EXPECT_EQ(bucket_of(AgeBand::k25To34), AgeBucket::kEarlyWorking);
  EXPECT_EQ(bucket_of(AgeBand::k35To44), AgeBucket::kEarlyWorking);
  EXPECT_EQ(bucket_of(AgeBand::k45To54), AgeBucket::kLateWorking);
  EXPECT_EQ(bucket_of(AgeBand::k55To64), AgeBucket::kLateWorking);
  EXPECT_EQ(bucket_of(AgeBand::k65Plus), AgeBucket::kSenior);
  for (AgeBand band : kAllAgeBands) EXPECT_EQ(parse_age_band(band_id(band)), band);
}

TEST(Labels, TaskLabelKeysAreOrdered) {
  EXPECT_EQ(label_keys(Task::kGender), (std::vector<std::string>{"female", "male"}));
  EXPECT_EQ(label_keys(Task::kAge),
            (std::vector<std::string>{"young", "early_working", "late_working", "senior"}));
  EXPECT_TRUE(label_keys(Task::kTheme).empty());
  EXPECT_EQ(display_for_key("senior"), "Senior");
  EXPECT_EQ(display_for_key("unparsed"), "unparsed");
}

}  // namespace
}  // namespace targetlens
