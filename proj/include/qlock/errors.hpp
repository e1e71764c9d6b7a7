#pragma once

#include <stdexcept>
#include <string>

namespace qlock {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments: wrong dimensions, invalid indices, out-of-range parameters.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A matrix that was supposed to be a state is not one (e.g. a non-PSD
/// construction for the requested parameters).
class InvalidState : public Error {
 public:
  InvalidState(const std::string& what, double min_eigenvalue)
      : Error(what), min_eigenvalue_(min_eigenvalue) {}

  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

/// Requested total dimension exceeds the configured cap.
class DimensionCapExceeded : public Error {
 public:
  using Error::Error;
};

/// Experiment name not present in the registry.
class UnknownExperiment : public Error {
 public:
  using Error::Error;
};

}  // namespace qlock
