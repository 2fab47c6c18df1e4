#pragma once

#include <stdexcept>
#include <string>

namespace boundselect {

// Stable error codes. The CLI maps these onto exit statuses and emits the
// code string in its machine-readable error report.
enum class ErrorCode {
  DimensionMismatch,
  SpecInvalid,
  CovarianceInvalid,
  DataSchema,
  StratumMin,
  ConfigInvalid,
  JsonParse,
  FileNotFound,
  SolverBracket,
  WindowMass,
  NotPsd,
  LpEnumCap,
  LpDegenerate,
  EventViolated,
  ReplicationFailures,
};

const char* error_code_name(ErrorCode code);

// Exit status class: validation problems (2) versus numerical failures (3).
bool is_numerical(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  const char* code_name() const noexcept { return error_code_name(code_); }

 private:
  ErrorCode code_;
};

}  // namespace boundselect
