#include "geoloc/error.hpp"

namespace geoloc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::TooLargeForBruteForce: return "TooLargeForBruteForce";
    case ErrorCode::EmptyPointSet: return "EmptyPointSet";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::FitDiverged: return "FitDiverged";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::CoincidentCenters: return "CoincidentCenters";
    case ErrorCode::TooFewCircles: return "TooFewCircles";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::EmptyCloud: return "EmptyCloud";
    case ErrorCode::UnattachableTarget: return "UnattachableTarget";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::KTooLarge:
      return ErrorCategory::Config;
    case ErrorCode::ParseError:
    case ErrorCode::ValidationError:
    case ErrorCode::IoError:
    case ErrorCode::UnknownNode:
    case ErrorCode::InsufficientData:
    case ErrorCode::DegenerateData:
    case ErrorCode::UnattachableTarget:
      return ErrorCategory::Data;
    default:
      return ErrorCategory::Algorithm;
  }
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what),
      code_(code) {}

}  // namespace geoloc
