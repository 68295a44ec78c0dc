#include "rootflow/errors.hpp"

namespace rootflow {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Config: return "ConfigError";
    case ErrorCode::Io: return "IoError";
    case ErrorCode::StabilityViolation: return "StabilityViolation";
    case ErrorCode::DomainTooSmall: return "DomainTooSmall";
    case ErrorCode::NonIntegrable: return "NonIntegrable";
    case ErrorCode::BadExponents: return "BadExponents";
    case ErrorCode::DegreeUnderflow: return "DegreeUnderflow";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::BadTable: return "BadTable";
    case ErrorCode::PoleHit: return "PoleHit";
    case ErrorCode::SumNearZero: return "SumNearZero";
    case ErrorCode::OnCircle: return "OnCircle";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
  }
  return "Unknown";
}

nlohmann::json Error::to_json() const {
  return {{"error", std::string(error_code_name(code_))},
          {"message", what()},
          {"details", details_}};
}

}  // namespace rootflow
