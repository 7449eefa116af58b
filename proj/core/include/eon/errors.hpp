#pragma once

#include <stdexcept>
#include <string>

namespace eon {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition (length, filter count, range).
class ContractViolation : public Error {
public:
  using Error::Error;
};

/// Image, kernel or vector shapes that do not line up.
class DimensionMismatch : public ContractViolation {
public:
  using ContractViolation::ContractViolation;
};

/// Window or canvas geometry that cannot hold the requested patch.
class GeometryError : public ContractViolation {
public:
  using ContractViolation::ContractViolation;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

// File and container errors. Each failure mode has its own type so callers
// and tests can tell them apart.
class IoError : public Error {
public:
  using Error::Error;
};
class BadMagic : public IoError {
public:
  using IoError::IoError;
};
class TruncatedPayload : public IoError {
public:
  using IoError::IoError;
};
class CountMismatch : public IoError {
public:
  using IoError::IoError;
};
class UnsupportedVersion : public IoError {
public:
  using IoError::IoError;
};
class ChecksumMismatch : public IoError {
public:
  using IoError::IoError;
};
class ConfigMismatch : public IoError {
public:
  using IoError::IoError;
};
class FormatError : public IoError {
public:
  using IoError::IoError;
};

class PlacementError : public Error {
public:
  using Error::Error;
};

} // namespace eon
