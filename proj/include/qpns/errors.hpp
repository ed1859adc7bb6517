#pragma once

#include <stdexcept>
#include <string>

namespace qpns {

/// Base of every error raised by the library. Each concrete error names one
/// failure mode so callers (and the CLI exit-status mapping) can dispatch on type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

class NonZeroMean : public Error {
 public:
  using Error::Error;
};

class NonZeroSpaceMean : public Error {
 public:
  using Error::Error;
};

class ResonantMode : public Error {
 public:
  using Error::Error;
};

class NegativeTime : public Error {
 public:
  using Error::Error;
};

class StepTooLarge : public Error {
 public:
  using Error::Error;
};

class InsufficientSamples : public Error {
 public:
  using Error::Error;
};

class EmptySeries : public Error {
 public:
  using Error::Error;
};

class ConfigParse : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class SnapshotMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace qpns
