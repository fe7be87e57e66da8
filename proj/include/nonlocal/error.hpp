#pragma once

#include <stdexcept>
#include <string>

namespace nonlocal {

// Every failure the library can report.  Budget and iteration limits are kept
// separate from input errors so callers (and the CLI exit-code mapping) can
// tell "bad input" apart from "gave up under the configured resources".
enum class ErrorCode {
  NonNormalizedDistribution,
  NegativeProbability,
  IncompletePredicate,
  UnknownGame,
  InvalidSizeParameter,
  SizeBudgetExceeded,
  EnumerationBudgetExceeded,
  StrategyShapeMismatch,
  NonNormalizedMixture,
  DimensionMismatch,
  ShapeMismatch,
  InvalidMeasurement,
  NonUnitary,
  LpInfeasible,
  LpUnbounded,
  LpIterationLimit,
  UnsupportedSharedState,
  BudgetViolation,
  ParseError,
  InvalidArgument,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

  // True for conditions caused by configured resource limits rather than by
  // malformed input.
  bool is_resource_limit() const {
    return code_ == ErrorCode::SizeBudgetExceeded ||
           code_ == ErrorCode::EnumerationBudgetExceeded ||
           code_ == ErrorCode::LpIterationLimit;
  }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace nonlocal
