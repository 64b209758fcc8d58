#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace targetlens {

enum class Gender { kFemale, kMale };

// Age groups of 18+ audiences. Raw band 13-17 belongs to none of them.
enum class AgeBucket { kYoung, kEarlyWorking, kLateWorking, kSenior };

// Raw age bands as reported by the ad library.
enum class AgeBand { k13To17, k18To24, k25To34, k35To44, k45To54, k55To64, k65Plus };

inline constexpr std::array<Gender, 2> kAllGenders = {Gender::kFemale, Gender::kMale};
inline constexpr std::array<AgeBucket, 4> kAllAgeBuckets = {
    AgeBucket::kYoung, AgeBucket::kEarlyWorking, AgeBucket::kLateWorking,
    AgeBucket::kSenior};
inline constexpr std::array<AgeBand, 7> kAllAgeBands = {
    AgeBand::k13To17, AgeBand::k18To24, AgeBand::k25To34, AgeBand::k35To44,
    AgeBand::k45To54, AgeBand::k55To64, AgeBand::k65Plus};

enum class Task { kGender, kAge, kTheme };

// Prediction tasks only; kTheme is not a classification task.
inline constexpr std::array<Task, 2> kPredictionTasks = {Task::kGender, Task::kAge};

// Stable machine keys ("female", "early_working", ...) used in files and
// confusion matrices.
std::string_view key(Gender g) noexcept;
std::string_view key(AgeBucket b) noexcept;
std::string_view key(Task t) noexcept;
std::string_view band_id(AgeBand band) noexcept;

// Human display names ("Female", "Early Working", ...).
std::string_view display_name(Gender g) noexcept;
std::string_view display_name(AgeBucket b) noexcept;

// Case-insensitive; accepts the key or the display name.
std::optional<Gender> parse_gender(std::string_view text);
std::optional<AgeBucket> parse_age_bucket(std::string_view text);
std::optional<Task> parse_task(std::string_view text);
std::optional<AgeBand> parse_age_band(std::string_view text);

// Bucket a raw band maps to; nullopt for 13-17.
std::optional<AgeBucket> bucket_of(AgeBand band) noexcept;

// Ordered label keys of a prediction task; empty for kTheme.
std::vector<std::string> label_keys(Task task);

// Display name for any label key of either axis; falls back to the key.
std::string display_for_key(std::string_view label_key);

}  // namespace targetlens
