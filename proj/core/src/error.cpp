#include "targetlens/error.hpp"

#include <fmt/format.h>

namespace targetlens {

int exit_code_for(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::kConfig:
      return 1;
    case ErrorCategory::kData:
      return 2;
    case ErrorCategory::kProvider:
      return 3;
  }
  return 2;
}

const char* category_name(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::kConfig:
      return "configuration";
    case ErrorCategory::kData:
      return "data";
    case ErrorCategory::kProvider:
      return "provider";
  }
  return "unknown";
}

ParseError::ParseError(std::size_t row, std::string field,
                       const std::string& detail)
    : DataError(fmt::format("row {}: field '{}': {}", row, field, detail)),
      row_(row),
      field_(std::move(field)) {}

DuplicateIdError::DuplicateIdError(const std::string& ad_id)
    : DataError(fmt::format("duplicate ad_id '{}'", ad_id)) {}

UndefinedGroupError::UndefinedGroupError(std::string group,
                                         const std::string& metric)
    : DataError(fmt::format("{} is undefined for group '{}' (zero denominator)",
                            metric, group)),
      group_(std::move(group)) {}

ReplayMissError::ReplayMissError(const std::string& hash)
    : ProviderError(fmt::format("replay store has no response for request {}", hash)) {}

ThemeParseError::ThemeParseError(const std::string& detail, std::string raw)
    : ProviderError(fmt::format("cannot parse theme response: {}", detail)),
      raw_(std::move(raw)) {}

StageError::StageError(ErrorCategory category, std::string module,
                       std::string stage, const std::string& message)
    : Error(category, fmt::format("[{}/{}] {}", module, stage, message)),
      module_(std::move(module)),
      stage_(std::move(stage)) {}

}  // namespace targetlens
