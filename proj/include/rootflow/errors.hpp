#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"

namespace rootflow {

enum class ErrorCode {
  InvalidArgument,
  Config,
  Io,
  StabilityViolation,
  DomainTooSmall,
  NonIntegrable,
  BadExponents,
  DegreeUnderflow,
  NoConvergence,
  BadTable,
  PoleHit,
  SumNearZero,
  OnCircle,
  SchemaMismatch,
};

std::string_view error_code_name(ErrorCode code);

/// Every failure raised by the library. `details` carries machine-readable
/// context (iteration counts, offending indices, trial coordinates).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, nlohmann::json details = nlohmann::json::object())
      : std::runtime_error(message), code_(code), details_(std::move(details)) {}

  ErrorCode code() const noexcept { return code_; }
  const nlohmann::json& details() const noexcept { return details_; }
  nlohmann::json& details() noexcept { return details_; }

  /// Config-class errors map to CLI exit code 2, everything else to 3.
  bool is_config_error() const noexcept {
    return code_ == ErrorCode::Config || code_ == ErrorCode::InvalidArgument;
  }

  nlohmann::json to_json() const;

 private:
  ErrorCode code_;
  nlohmann::json details_;
};

}  // namespace rootflow
