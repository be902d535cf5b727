#pragma once

#include <stdexcept>
#include <string>

namespace spoofprint {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unsupported file content (WAV headers, protocol rows, checkpoints).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failures: missing, unreadable, unwritable or truncated files.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Configuration values outside their documented ranges.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Matrix/vector dimensions that do not line up.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Inputs that violate an operation's precondition (too few records, non-unit rows, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Artifact written by an incompatible format version.
class VersionError : public FormatError {
 public:
  VersionError(const std::string& what, unsigned expected, unsigned found)
      : FormatError(what), expected_(expected), found_(found) {}
  unsigned expected() const noexcept { return expected_; }
  unsigned found() const noexcept { return found_; }

 private:
  unsigned expected_;
  unsigned found_;
};

}  // namespace spoofprint
