#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace anguilla {

enum class ErrorCode {
  kInvalidArgument = 1,
  kValidation,
  kJointLimit,
  kInfeasibleCable,
  kDiverged,
  kIo,
  kParse,
  kProtocol,
};

/// Stable lowercase name used in logs and on the wire.
const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// One violated invariant: the offending field and the bound it broke.
struct FieldError {
  std::string field;
  std::string message;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<FieldError> errors);

  const std::vector<FieldError>& errors() const noexcept { return errors_; }

 private:
  std::vector<FieldError> errors_;
};

}  // namespace anguilla
