#pragma once

#include <stdexcept>
#include <string>

namespace hfl {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  Unavailable,        // data withheld, e.g. factor-B labels in situation I
  AcceptanceFailure,  // rejection sampler exhausted its attempt budget
  TooLarge,           // exhaustive enumeration guard
  EmptyEvent,         // conditioning event has probability zero
  Io,
  Config,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, ErrorCode code, const char* what) {
  if (!ok) fail(code, what);
}

}  // namespace hfl
