#include "targetlens/labels.hpp"

#include <algorithm>
#include <cctype>

namespace targetlens {

namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view key(Gender g) noexcept {
  return g == Gender::kFemale ? "female" : "male";
}

std::string_view key(AgeBucket b) noexcept {
  switch (b) {
    case AgeBucket::kYoung:
      return "young";
    case AgeBucket::kEarlyWorking:
      return "early_working";
    case AgeBucket::kLateWorking:
      return "late_working";
    case AgeBucket::kSenior:
      return "senior";
  }
  return "";
}

std::string_view key(Task t) noexcept {
  switch (t) {
    case Task::kGender:
      return "gender";
    case Task::kAge:
      return "age";
    case Task::kTheme:
      return "theme";
  }
  return "";
}

std::string_view band_id(AgeBand band) noexcept {
  switch (band) {
    case AgeBand::k13To17:
      return "13-17";
    case AgeBand::k18To24:
      return "18-24";
    case AgeBand::k25To34:
      return "25-34";
    case AgeBand::k35To44:
      return "35-44";
    case AgeBand::k45To54:
      return "45-54";
    case AgeBand::k55To64:
      return "55-64";
    case AgeBand::k65Plus:
      return "65+";
  }
  return "";
}

std::string_view display_name(Gender g) noexcept {
  return g == Gender::kFemale ? "Female" : "Male";
}

std::string_view display_name(AgeBucket b) noexcept {
  switch (b) {
    case AgeBucket::kYoung:
      return "Young";
    case AgeBucket::kEarlyWorking:
      return "Early Working";
    case AgeBucket::kLateWorking:
      return "Late Working";
    case AgeBucket::kSenior:
      return "Senior";
  }
  return "";
}

std::optional<Gender> parse_gender(std::string_view text) {
  text = trim(text);
  for (Gender g : kAllGenders) {
    if (iequals(text, key(g)) || iequals(text, display_name(g))) return g;
  }
  return std::nullopt;
}

std::optional<AgeBucket> parse_age_bucket(std::string_view text) {
  text = trim(text);
  for (AgeBucket b : kAllAgeBuckets) {
    if (iequals(text, key(b)) || iequals(text, display_name(b))) return b;
  }
  return std::nullopt;
}

std::optional<Task> parse_task(std::string_view text) {
  text = trim(text);
  for (Task t : {Task::kGender, Task::kAge, Task::kTheme}) {
    if (iequals(text, key(t))) return t;
  }
  return std::nullopt;
}

std::optional<AgeBand> parse_age_band(std::string_view text) {
  text = trim(text);
  for (AgeBand band : kAllAgeBands) {
    if (text == band_id(band)) return band;
  }
  return std::nullopt;
}

std::optional<AgeBucket> bucket_of(AgeBand band) noexcept {
  switch (band) {
    case AgeBand::k13To17:
      return std::nullopt;
    case AgeBand::k18To24:
      return AgeBucket::kYoung;
    case AgeBand::k25To34:
    case AgeBand::k35To44:
      return AgeBucket::kEarlyWorking;
    case AgeBand::k45To54:
    case AgeBand::k55To64:
      return AgeBucket::kLateWorking;
    case AgeBand::k65Plus:
      return AgeBucket::kSenior;
  }
  return std::nullopt;
}

std::vector<std::string> label_keys(Task task) {
  std::vector<std::string> out;
  if (task == Task::kGender) {
    for (Gender g : kAllGenders) out.emplace_back(key(g));
  } else if (task == Task::kAge) {
    for (AgeBucket b : kAllAgeBuckets) out.emplace_back(key(b));
  }
  return out;
}

std::string display_for_key(std::string_view label_key) {
  for (Gender g : kAllGenders) {
    if (label_key == key(g)) return std::string(display_name(g));
  }
  for (AgeBucket b : kAllAgeBuckets) {
    if (label_key == key(b)) return std::string(display_name(b));
  }
  return std::string(label_key);
}

}  // namespace targetlens
