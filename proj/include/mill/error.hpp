#pragma once

#include <stdexcept>
#include <string>

namespace mill {

enum class ErrorCode {
  lexing,
  structure,
  invalid_argument,
  schema,
  pipeline,
  extraction,
  skipped,
  ambiguous,
  unsupported,
  check,
  io,
  underivable,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mill
