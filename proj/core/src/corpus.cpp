#include "targetlens/corpus.hpp"

#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "targetlens/digest.hpp"
#include "targetlens/error.hpp"

namespace targetlens {

namespace {

// Slack for comparing a share against the threshold after renormalization.
constexpr double kShareSlack = 1e-12;
constexpr double kFractionSumTolerance = 1e-6;

bool is_integral(double v) { return std::floor(v) == v; }

// A share map is read as fractions when any value is non-integral; then it
// must sum to one. All-integer maps are counts and carry no sum constraint.
void check_shares(const std::vector<std::pair<std::string, double>>& shares,
                  const char* what) {
  double sum = 0.0;
  bool fractional = false;
  for (const auto& [name, value] : shares) {
    if (!std::isfinite(value) || value < 0.0) {
      throw SchemaError(fmt::format("{} share '{}' must be a nonnegative number", what, name));
    }
    sum += value;
    fractional = fractional || !is_integral(value);
  }
  if (fractional && std::abs(sum - 1.0) > kFractionSumTolerance) {
    throw SchemaError(fmt::format("{} shares sum ≠ 1 (sum = {})", what, sum));
  }
}

void check_range(const Range& r, const char* what) {
  if (!std::isfinite(r.lower) || !std::isfinite(r.upper) || r.lower < 0.0 ||
      r.upper < r.lower) {
    throw SchemaError(fmt::format("{} must be a nonnegative range with lower <= upper", what));
  }
}

}  // namespace

std::optional<std::string> LabeledAd::target_key(Task task) const {
  if (task == Task::kGender && gender_target) return std::string(key(*gender_target));
  if (task == Task::kAge && age_target) return std::string(key(*age_target));
  return std::nullopt;
}

std::optional<CorpusFormat> parse_corpus_format(std::string_view name) {
  if (name == "jsonl") return CorpusFormat::kJsonl;
  if (name == "csv") return CorpusFormat::kCsv;
  return std::nullopt;
}

void validate_ad(const AdRecord& ad) {
  if (ad.ad_id.empty()) throw SchemaError("ad_id must be nonempty");
  if (ad.title.empty() && ad.description.empty() && ad.body.empty()) {
    throw SchemaError("at least one of title/description/body must be nonempty");
  }
  check_range(ad.spend, "spend");
  check_range(ad.impressions, "impressions");
  check_shares({{"male", ad.gender_impressions.male},
                {"female", ad.gender_impressions.female},
                {"unknown", ad.gender_impressions.unknown}},
               "gender");
  std::vector<std::pair<std::string, double>> age;
  for (const auto& [band, value] : ad.age_impressions) {
    age.emplace_back(std::string(band_id(band)), value);
  }
  check_shares(age, "age");
}

std::map<AgeBucket, double> bucket_age_shares(const AgeImpressions& age_impressions) {
  std::map<AgeBucket, double> buckets;
  double mapped = 0.0;
  for (const auto& [band, value] : age_impressions) {
    auto bucket = bucket_of(band);
    if (!bucket || value <= 0.0) continue;
    buckets[*bucket] += value;
    mapped += value;
  }
  if (mapped <= 0.0) return {};
  for (auto& [bucket, value] : buckets) value /= mapped;
  return buckets;
}

std::map<AgeBucket, double> bucket_age_shares(const std::map<std::string, double>& raw) {
  AgeImpressions bands;
  for (const auto& [id, value] : raw) {
    auto band = parse_age_band(id);
    if (!band) throw SchemaError(fmt::format("unknown age band '{}'", id));
    bands[*band] += value;
  }
  return bucket_age_shares(bands);
}

LabeledAd derive_targets(const AdRecord& ad, double threshold) {
  if (!(threshold > 0.5 && threshold <= 1.0)) {
    throw ParameterError(
        fmt::format("exclusivity threshold must lie in (0.5, 1.0], got {}", threshold));
  }
  LabeledAd labeled{ad, std::nullopt, std::nullopt, threshold};

  // Unknown-gender impressions are unattributable and excluded.
  const double attributed = ad.gender_impressions.male + ad.gender_impressions.female;
  if (attributed > 0.0) {
    if (ad.gender_impressions.female / attributed >= threshold - kShareSlack) {
      labeled.gender_target = Gender::kFemale;
    } else if (ad.gender_impressions.male / attributed >= threshold - kShareSlack) {
      labeled.gender_target = Gender::kMale;
    }
  }

  for (const auto& [bucket, share] : bucket_age_shares(ad.age_impressions)) {
    if (share >= threshold - kShareSlack) {
      labeled.age_target = bucket;
      break;
    }
  }
  return labeled;
}

std::vector<LabeledAd> derive_targets(std::span<const AdRecord> ads, double threshold) {
  std::vector<LabeledAd> out;
  out.reserve(ads.size());
  for (const auto& ad : ads) out.push_back(derive_targets(ad, threshold));
  return out;
}

std::string ad_text(const AdRecord& ad, const TextAssembly& assembly) {
  std::string text;
  auto append = [&text](const std::string& field) {
    if (field.empty()) return;
    if (!text.empty()) text.push_back('\n');
    text += field;
  };
  if (assembly.title) append(ad.title);
  if (assembly.description) append(ad.description);
  if (assembly.body) append(ad.body);
  return text;
}

std::string corpus_digest(std::span<const AdRecord> ads) {
  std::ostringstream out;
  write_corpus(out, ads, CorpusFormat::kJsonl);
  return sha256_hex(out.str());
}

CorpusSummary summarize(std::span<const LabeledAd> ads) {
  CorpusSummary summary;
  summary.total_ads = ads.size();
  for (const auto& ad : ads) {
    if (ad.gender_target) ++summary.gender_targets[std::string(key(*ad.gender_target))];
    if (ad.age_target) ++summary.age_targets[std::string(key(*ad.age_target))];
    if (ad.gender_target || ad.age_target) ++summary.targeted_ads;
  }
  return summary;
}

}  // namespace targetlens
