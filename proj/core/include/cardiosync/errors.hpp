#pragma once

#include <stdexcept>
#include <string>

namespace cardiosync {

// Every failure raised by the library carries one of these kinds so callers
// (and the CLI exit-code mapping) can tell bad configuration from bad input
// data from data that is merely too short/sparse for the requested analysis.
enum class ErrorKind {
  InvalidConfig,
  InvalidInput,
  EmptyResult,
  InsufficientData,
  OutOfRange,
  ParseError,
  RateMismatch,
  NonUniform,
  ManifestError,
  MissingFile,
  AlignmentError,
  Internal,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace cardiosync
