#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fluxrnn {

// Broad failure classes. The CLI maps these onto process exit codes.
enum class ErrorCategory {
  kConfig,        // exit 2
  kData,          // exit 3
  kNumeric,       // exit 4
  kPrecondition,  // programming or argument error
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class PreconditionViolation : public Error {
 public:
  explicit PreconditionViolation(const std::string& what)
      : Error(ErrorCategory::kPrecondition, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::kConfig, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorCategory::kData, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorCategory::kNumeric, what) {}
};

// --- time series ------------------------------------------------------------

class SiteRejected : public DataError {
 public:
  explicit SiteRejected(double valid_fraction)
      : DataError("site rejected: valid fraction " + std::to_string(valid_fraction)),
        valid_fraction_(valid_fraction) {}
  double valid_fraction() const noexcept { return valid_fraction_; }

 private:
  double valid_fraction_;
};

class LengthMismatch : public DataError {
 public:
  explicit LengthMismatch(const std::string& what) : DataError("length mismatch: " + what) {}
};

class EmptyColumn : public DataError {
 public:
  explicit EmptyColumn(const std::string& feature)
      : DataError("feature column '" + feature + "' has no present values"), feature_(feature) {}
  const std::string& feature() const noexcept { return feature_; }

 private:
  std::string feature_;
};

class EmptySplit : public DataError {
 public:
  explicit EmptySplit(const std::string& what) : DataError("empty split: " + what) {}
};

// --- feature engineering ------------------------------------------------------

class DivisionByZero : public NumericError {
 public:
  explicit DivisionByZero(const std::string& name)
      : NumericError("division by zero in " + name) {}
};

class MissingBand : public DataError {
 public:
  explicit MissingBand(const std::string& name) : DataError("missing band for " + name) {}
};

class NonPositiveInput : public NumericError {
 public:
  explicit NonPositiveInput(const std::string& what) : NumericError(what) {}
};

class DegenerateMatrix : public DataError {
 public:
  explicit DegenerateMatrix(const std::string& what) : DataError("degenerate matrix: " + what) {}
};

class ShapeMismatch : public PreconditionViolation {
 public:
  explicit ShapeMismatch(const std::string& what) : PreconditionViolation("shape mismatch: " + what) {}
};

// --- extremes ---------------------------------------------------------------

class EmptySeries : public DataError {
 public:
  EmptySeries() : DataError("series has no present values") {}
};

class MissingCycleDay : public DataError {
 public:
  MissingCycleDay(unsigned month, unsigned day)
      : DataError("seasonal cycle undefined for " + std::to_string(month) + "-" +
                  std::to_string(day)) {}
};

class InsufficientData : public DataError {
 public:
  explicit InsufficientData(std::size_t present)
      : DataError("only " + std::to_string(present) + " present values") {}
};

// --- recurrent engine / training -----------------------------------------------

class InvalidArchitecture : public ConfigError {
 public:
  explicit InvalidArchitecture(const std::string& what)
      : ConfigError("invalid architecture: " + what) {}
};

class NonFiniteActivation : public NumericError {
 public:
  explicit NonFiniteActivation(const std::string& what)
      : NumericError("non-finite activation: " + what) {}
};

class CacheMismatch : public PreconditionViolation {
 public:
  explicit CacheMismatch(const std::string& what)
      : PreconditionViolation("forward cache mismatch: " + what) {}
};

class EmptyBatch : public PreconditionViolation {
 public:
  EmptyBatch() : PreconditionViolation("empty batch") {}
};

class EmptySpace : public ConfigError {
 public:
  explicit EmptySpace(const std::string& what) : ConfigError("empty search space: " + what) {}
};

// --- evaluation -------------------------------------------------------------

class ZeroRange : public DataError {
 public:
  ZeroRange() : DataError("observed values have zero range") {}
};

class SingleSample : public DataError {
 public:
  SingleSample() : DataError("at least two samples are required") {}
};

// --- io ---------------------------------------------------------------------

class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class NonConsecutiveDates : public DataError {
 public:
  explicit NonConsecutiveDates(std::size_t line)
      : DataError("line " + std::to_string(line) + ": dates are not consecutive"), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DuplicateFeature : public DataError {
 public:
  explicit DuplicateFeature(const std::string& name)
      : DataError("duplicate feature column '" + name + "'") {}
};

class BadMagic : public DataError {
 public:
  BadMagic() : DataError("checkpoint: bad magic") {}
};

class VersionUnsupported : public DataError {
 public:
  explicit VersionUnsupported(unsigned version)
      : DataError("checkpoint: unsupported format version " + std::to_string(version)) {}
};

class TruncatedFile : public DataError {
 public:
  explicit TruncatedFile(const std::string& what) : DataError("checkpoint truncated: " + what) {}
};

class InvalidSpec : public ConfigError {
 public:
  explicit InvalidSpec(const std::string& what) : ConfigError("invalid synth spec: " + what) {}
};

}  // namespace fluxrnn
