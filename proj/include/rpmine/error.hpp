#pragma once

#include <stdexcept>
#include <string>

namespace rpmine {

enum class ErrorCode {
  UnknownUiType,
  MalformedTimestamp,
  MalformedCsv,
  OrderViolation,
  InvalidSchema,
  EmptyLog,
  NoMatch,
  MisalignedInstances,
  UnseenDeterminantValue,
  PatternMismatch,
  BothEmpty,
  LengthMismatch,
  Io,
};

const char* error_code_name(ErrorCode code);

/// Exception carrying a machine-checkable error code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rpmine
