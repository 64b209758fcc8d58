#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace targetlens {

// Broad failure classes. The CLI maps these onto its exit codes.
enum class ErrorCategory {
  kConfig,    // exit 1
  kData,      // exit 2
  kProvider,  // exit 3
};

int exit_code_for(ErrorCategory category) noexcept;
const char* category_name(ErrorCategory category) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message)
      : Error(ErrorCategory::kConfig, message) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& message)
      : Error(ErrorCategory::kData, message) {}
};

class ProviderError : public Error {
 public:
  explicit ProviderError(const std::string& message)
      : Error(ErrorCategory::kProvider, message) {}
};

/// A malformed corpus row. `row` is 1-based; `field` names the offending key.
class ParseError : public DataError {
 public:
  ParseError(std::size_t row, std::string field, const std::string& detail);

  std::size_t row() const noexcept { return row_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t row_;
  std::string field_;
};

class DuplicateIdError : public DataError {
 public:
  explicit DuplicateIdError(const std::string& ad_id);
};

class SchemaError : public DataError {
 public:
  using DataError::DataError;
};

class InputError : public DataError {
 public:
  using DataError::DataError;
};

class LabelSetError : public DataError {
 public:
  using DataError::DataError;
};

class EmptyEvaluationError : public DataError {
 public:
  using DataError::DataError;
};

/// A fairness metric whose denominator vanishes for `group`.
class UndefinedGroupError : public DataError {
 public:
  UndefinedGroupError(std::string group, const std::string& metric);

  const std::string& group() const noexcept { return group_; }

 private:
  std::string group_;
};

class DegenerateTableError : public DataError {
 public:
  using DataError::DataError;
};

class ParameterError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Replay store has no entry for a request hash.
class ReplayMissError : public ProviderError {
 public:
  explicit ReplayMissError(const std::string& hash);
};

/// Provider output for theme synthesis could not be parsed; keeps the raw text.
class ThemeParseError : public ProviderError {
 public:
  ThemeParseError(const std::string& detail, std::string raw);

  const std::string& raw_text() const noexcept { return raw_; }

 private:
  std::string raw_;
};

/// Wraps a module failure with the audit stage that raised it.
class StageError : public Error {
 public:
  StageError(ErrorCategory category, std::string module, std::string stage,
             const std::string& message);

  const std::string& module() const noexcept { return module_; }
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string module_;
  std::string stage_;
};

}  // namespace targetlens
