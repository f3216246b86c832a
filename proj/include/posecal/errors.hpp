#pragma once

#include <stdexcept>
#include <string>

namespace posecal {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A numeric or structural precondition was violated (degenerate box,
/// non-positive scale, empty input, ...).
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

/// A 3D point with z <= 0 cannot be projected.
class BehindCameraError : public Error {
 public:
  using Error::Error;
};

/// Not enough independent data to fit a model.
class UnderdeterminedError : public Error {
 public:
  using Error::Error;
};

/// RANSAC found no consensus set of the required size.
class NoModelError : public Error {
 public:
  using Error::Error;
};

/// Role assignment could not separate the two detections.
class AmbiguousRoleError : public Error {
 public:
  using Error::Error;
};

/// Role assignment was asked to label a frame without exactly two detections.
class UnsupportedCardinalityError : public Error {
 public:
  using Error::Error;
};

/// Two rasters or matrices do not have compatible dimensions.
class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

/// A file could not be parsed; carries a 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, long line = 0)
      : Error(line > 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
        line_(line) {}

  long line() const { return line_; }

 private:
  long line_ = 0;
};

}  // namespace posecal
