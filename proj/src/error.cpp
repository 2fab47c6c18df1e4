#include "boundselect/error.hpp"

namespace boundselect {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::SpecInvalid: return "SPEC_INVALID";
    case ErrorCode::CovarianceInvalid: return "SIGMA_INVALID";
    case ErrorCode::DataSchema: return "DATA_SCHEMA";
    case ErrorCode::StratumMin: return "STRATUM_MIN";
    case ErrorCode::ConfigInvalid: return "CONFIG_INVALID";
    case ErrorCode::JsonParse: return "JSON_PARSE";
    case ErrorCode::FileNotFound: return "FILE_NOT_FOUND";
    case ErrorCode::SolverBracket: return "SOLVER_BRACKET";
    case ErrorCode::WindowMass: return "WINDOW_MASS";
    case ErrorCode::NotPsd: return "NOT_PSD";
    case ErrorCode::LpEnumCap: return "LP_ENUM_CAP";
    case ErrorCode::LpDegenerate: return "LP_DEGENERATE";
    case ErrorCode::EventViolated: return "EVENT_VIOLATED";
    case ErrorCode::ReplicationFailures: return "REPLICATION_FAILURES";
  }
  return "UNKNOWN";
}

bool is_numerical(ErrorCode code) {
  switch (code) {
    case ErrorCode::SolverBracket:
    case ErrorCode::WindowMass:
    case ErrorCode::NotPsd:
    case ErrorCode::LpEnumCap:
    case ErrorCode::LpDegenerate:
    case ErrorCode::EventViolated:
    case ErrorCode::ReplicationFailures:
      return true;
    default:
      return false;
  }
}

}  // namespace boundselect
