#pragma once

#include <stdexcept>
#include <string>

namespace mcf {

enum class ErrorCode {
  invalid_argument = 1,
  domain_error,
  config_error,
  io_error,
  cfl_violation,
  solver_abort,
  not_converged,
};

/// Base exception for the library. The code is mirrored one-to-one by the
/// status values of the C interface.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, const std::string& what,
                    ErrorCode code = ErrorCode::invalid_argument) {
  if (!cond) fail(code, what);
}

}  // namespace mcf
