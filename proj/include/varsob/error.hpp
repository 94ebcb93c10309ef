#pragma once

#include <stdexcept>
#include <string>

namespace varsob {

enum class ErrorCode {
  invalid_argument = 1,
  domain = 2,
  parse = 3,
  io = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, const std::string& what, ErrorCode code = ErrorCode::invalid_argument) {
  if (!ok) fail(code, what);
}

}  // namespace varsob
