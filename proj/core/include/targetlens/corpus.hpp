#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "targetlens/labels.hpp"

namespace targetlens {

// The ad library reports spend and impressions as ranges; a point value is
// stored with lower == upper.
struct Range {
  double lower = 0.0;
  double upper = 0.0;

  double midpoint() const noexcept { return 0.5 * (lower + upper); }
  bool operator==(const Range&) const = default;
};

// Impression shares. Values are either fractions summing to one or raw counts.
struct GenderImpressions {
  double male = 0.0;
  double female = 0.0;
  double unknown = 0.0;

  bool operator==(const GenderImpressions&) const = default;
};

using AgeImpressions = std::map<AgeBand, double>;

struct AdRecord {
  std::string ad_id;
  std::string title;
  std::string description;
  std::string body;
  std::string funding_entity;
  Range spend;
  Range impressions;
  GenderImpressions gender_impressions;
  AgeImpressions age_impressions;

  bool operator==(const AdRecord&) const = default;
};

// An ad plus its derived ground truth. A target is present only when one group
// holds at least `exclusivity_threshold` of that axis's attributed impressions.
struct LabeledAd {
  AdRecord ad;
  std::optional<Gender> gender_target;
  std::optional<AgeBucket> age_target;
  double exclusivity_threshold = 1.0;

  // Label key of the target for `task`, if any.
  std::optional<std::string> target_key(Task task) const;

  bool operator==(const LabeledAd&) const = default;
};

enum class CorpusFormat { kJsonl, kCsv };

std::optional<CorpusFormat> parse_corpus_format(std::string_view name);

// Reads one AdRecord per row, preserving order. Throws ParseError (with the
// 1-based row and field) on malformed rows and DuplicateIdError on repeated ids.
std::vector<AdRecord> parse_corpus(std::istream& source, CorpusFormat format);
std::vector<AdRecord> load_corpus(const std::filesystem::path& path, CorpusFormat format);

void write_corpus(std::ostream& out, std::span<const AdRecord> ads, CorpusFormat format);

// Throws SchemaError describing the first violated AdRecord invariant.
void validate_ad(const AdRecord& ad);

nlohmann::ordered_json to_json(const AdRecord& ad);
AdRecord ad_from_json(const nlohmann::json& j);

nlohmann::ordered_json to_json(const LabeledAd& ad);
LabeledAd labeled_ad_from_json(const nlohmann::json& j);

std::vector<LabeledAd> load_labeled(const std::filesystem::path& path);
void write_labeled(std::ostream& out, std::span<const LabeledAd> ads);

// Sums member bands per bucket and renormalizes over buckets after dropping
// 13-17. Empty when no mass falls in an 18+ band.
std::map<AgeBucket, double> bucket_age_shares(const AgeImpressions& age_impressions);
// Same, keyed by raw band identifiers; unknown identifiers raise SchemaError.
std::map<AgeBucket, double> bucket_age_shares(const std::map<std::string, double>& raw);

inline constexpr double kDefaultExclusivityThreshold = 1.0;

// `threshold` must lie in (0.5, 1]; ParameterError otherwise.
LabeledAd derive_targets(const AdRecord& ad, double threshold = kDefaultExclusivityThreshold);
std::vector<LabeledAd> derive_targets(std::span<const AdRecord> ads,
                                      double threshold = kDefaultExclusivityThreshold);

// Which text fields are sent to the model, and in what order.
struct TextAssembly {
  bool title = true;
  bool description = true;
  bool body = true;
};

// Nonempty fields joined by newlines in title, description, body order.
std::string ad_text(const AdRecord& ad, const TextAssembly& assembly = {});

// SHA-256 over the canonical JSONL serialization.
std::string corpus_digest(std::span<const AdRecord> ads);

struct CorpusSummary {
  std::size_t total_ads = 0;
  std::map<std::string, std::size_t> gender_targets;  // label key -> count
  std::map<std::string, std::size_t> age_targets;
  std::size_t targeted_ads = 0;  // ads with at least one target

  bool operator==(const CorpusSummary&) const = default;
};

CorpusSummary summarize(std::span<const LabeledAd> ads);

}  // namespace targetlens
