#include "cardiosync/errors.hpp"

namespace cardiosync {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidConfig: return "invalid config";
    case ErrorKind::InvalidInput: return "invalid input";
    case ErrorKind::EmptyResult: return "empty result";
    case ErrorKind::InsufficientData: return "insufficient data";
    case ErrorKind::OutOfRange: return "out of range";
    case ErrorKind::ParseError: return "parse error";
    case ErrorKind::RateMismatch: return "rate mismatch";
    case ErrorKind::NonUniform: return "non-uniform sampling";
    case ErrorKind::ManifestError: return "manifest error";
    case ErrorKind::MissingFile: return "missing file";
    case ErrorKind::AlignmentError: return "alignment error";
    case ErrorKind::Internal: return "internal error";
  }
  return "unknown error";
}

}  // namespace cardiosync
