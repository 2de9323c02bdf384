#pragma once

#include <stdexcept>
#include <string>

namespace lomac {

// Base for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Array or factor sizes that do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Grid too small for the stencil width.
class SizingError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Configuration that cannot be honoured (unknown key, bad value, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// File-level failures: missing file, truncated snapshot, version mismatch.
class IoError : public Error {
 public:
  using Error::Error;
};

// Rank growth past the configured cap.
class RankError : public Error {
 public:
  using Error::Error;
};

}  // namespace lomac
