#pragma once

#include <stdexcept>
#include <string>

namespace elwv {

// Numeric values are part of the C API (see elwv.h).
enum class ErrorCode : int {
  Ok = 0,
  InvalidArgument = 1,
  OutsideBall = 2,
  Degenerate = 3,
  CflViolation = 4,
  NoShock = 5,
  Io = 6,
  Config = 7,
  NotConverged = 8,
  OutOfRange = 9,
  Internal = 99
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace elwv
