#include "elwv/error.hpp"

namespace elwv {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Ok: return "ok";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::OutsideBall: return "outside-ball";
    case ErrorCode::Degenerate: return "degenerate-normalization";
    case ErrorCode::CflViolation: return "cfl-violation";
    case ErrorCode::NoShock: return "no-shock";
    case ErrorCode::Io: return "io";
    case ErrorCode::Config: return "config";
    case ErrorCode::NotConverged: return "not-converged";
    case ErrorCode::OutOfRange: return "out-of-range";
    case ErrorCode::Internal: return "internal";
  }
  return "unknown";
}

}  // namespace elwv
