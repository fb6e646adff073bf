#pragma once

#include <stdexcept>
#include <string>

namespace efda {

enum class ErrorCode {
  InvalidArgument = 1,
  Domain,             // natural parameter outside the open parameter space
  Support,            // observation outside the family's support
  DegenerateData,     // sufficient-statistic mean on the moment boundary
  EmptyClass,
  NoConvergence,
  UnsupportedFamily,
  Parse,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

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

}  // namespace efda
