#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace geoloc {

enum class ErrorCode {
  ParseError,
  ValidationError,
  IoError,
  ConfigError,
  UnknownNode,
  DisconnectedGraph,
  KTooLarge,
  TooLargeForBruteForce,
  EmptyPointSet,
  InsufficientData,
  DegenerateData,
  FitDiverged,
  DomainError,
  CoincidentCenters,
  TooFewCircles,
  TooFewPoints,
  EmptyCloud,
  UnattachableTarget,
};

// Coarse grouping used for process exit codes.
enum class ErrorCategory { Config, Data, Algorithm };

std::string_view to_string(ErrorCode code);
ErrorCategory category_of(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
};

}  // namespace geoloc
