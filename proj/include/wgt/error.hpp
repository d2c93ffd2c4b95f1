#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wgt {

enum class ErrorCode {
  NonPositiveWeight,
  TooFewNodes,
  DimensionMismatch,
  BadDimensions,
  BadProbability,
  BadRadius,
  InfeasibleAverageDegree,
  Disconnected,
  BadLaziness,
  DetailedBalanceViolation,
  EigensolverFailure,
  RhoOutOfRange,
  StepTooLarge,
  BadRange,
  SingularSystem,
  NonFinite,
  Parse,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::TooFewNodes: return "TooFewNodes";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::BadDimensions: return "BadDimensions";
    case ErrorCode::BadProbability: return "BadProbability";
    case ErrorCode::BadRadius: return "BadRadius";
    case ErrorCode::InfeasibleAverageDegree: return "InfeasibleAverageDegree";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::BadLaziness: return "BadLaziness";
    case ErrorCode::DetailedBalanceViolation: return "DetailedBalanceViolation";
    case ErrorCode::EigensolverFailure: return "EigensolverFailure";
    case ErrorCode::RhoOutOfRange: return "RhoOutOfRange";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::BadRange: return "BadRange";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

/// Every precondition violation in the library is reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace wgt
