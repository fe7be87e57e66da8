#include "nonlocal/error.hpp"

namespace nonlocal {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonNormalizedDistribution:
      return "NonNormalizedDistribution";
    case ErrorCode::NegativeProbability:
      return "NegativeProbability";
    case ErrorCode::IncompletePredicate:
      return "IncompletePredicate";
    case ErrorCode::UnknownGame:
      return "UnknownGame";
    case ErrorCode::InvalidSizeParameter:
      return "InvalidSizeParameter";
    case ErrorCode::SizeBudgetExceeded:
      return "SizeBudgetExceeded";
    case ErrorCode::EnumerationBudgetExceeded:
      return "EnumerationBudgetExceeded";
    case ErrorCode::StrategyShapeMismatch:
      return "StrategyShapeMismatch";
    case ErrorCode::NonNormalizedMixture:
      return "NonNormalizedMixture";
    case ErrorCode::DimensionMismatch:
      return "DimensionMismatch";
    case ErrorCode::ShapeMismatch:
      return "ShapeMismatch";
    case ErrorCode::InvalidMeasurement:
      return "InvalidMeasurement";
    case ErrorCode::NonUnitary:
      return "NonUnitary";
    case ErrorCode::LpInfeasible:
      return "LpInfeasible";
    case ErrorCode::LpUnbounded:
      return "LpUnbounded";
    case ErrorCode::LpIterationLimit:
      return "LpIterationLimit";
    case ErrorCode::UnsupportedSharedState:
      return "UnsupportedSharedState";
    case ErrorCode::BudgetViolation:
      return "BudgetViolation";
    case ErrorCode::ParseError:
      return "ParseError";
    case ErrorCode::InvalidArgument:
      return "InvalidArgument";
  }
  return "UnknownError";
}

}  // namespace nonlocal
