#pragma once

#include <stdexcept>
#include <string>

namespace advreg {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Input geometry that cannot be processed (zero spread, collinear pairs, ...).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// Training produced NaN/Inf. Carries the epoch at which it happened.
class NumericAbort : public Error {
 public:
  NumericAbort(const std::string& what, long epoch)
      : Error(what), epoch_(epoch) {}
  long epoch() const noexcept { return epoch_; }

 private:
  long epoch_;
};

// File ingestion errors. Each failure mode has its own type so callers can
// report them precisely.
class IoError : public Error {
 public:
  IoError(const std::string& what, std::string path)
      : Error(what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class MissingFile : public IoError {
 public:
  using IoError::IoError;
};

class MalformedFile : public IoError {
 public:
  using IoError::IoError;
};

class UnsupportedFormat : public IoError {
 public:
  using IoError::IoError;
};

class EmptyCloud : public IoError {
 public:
  using IoError::IoError;
};

}  // namespace advreg
