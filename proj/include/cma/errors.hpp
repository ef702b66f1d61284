// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace cma {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad argument: axis/index out of range, odd grid size, wrong bidegree, ...
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Two operands live on different grids.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// A field that must be real carries imaginary parts above tolerance.
class NotRealField : public Error {
 public:
  using Error::Error;
};

/// A pointwise matrix is singular or not positive-definite.
class SingularMetric : public Error {
 public:
  SingularMetric(const std::string& what, long long point, double value)
      : Error(what), point_(point), value_(value) {}

  /// Flat grid index of the offending point.
  long long point() const { return point_; }
  /// The offending determinant or eigenvalue.
  double value() const { return value_; }

 private:
  long long point_;
  double value_;
};

/// Malformed file or configuration content.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cma
