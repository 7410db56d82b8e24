#pragma once

#include <stdexcept>
#include <string>

namespace grwlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A warping function was evaluated outside its open interval.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// f(t) <= 0 (or non-finite) at an in-domain point.
class PositivityError : public Error {
 public:
  using Error::Error;
};

/// Empty, inverted, or out-of-domain sampling window.
class InvalidWindowError : public Error {
 public:
  using Error::Error;
};

/// Bad parameter value (catalog parameter, step count, grid size, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Surface violates the spacelike margin |Du|^2 < f(u)^2 - eps^2.
class SpacelikeError : public Error {
 public:
  using Error::Error;
};

/// Operation certified only for another fiber dimension.
class UnsupportedDimensionError : public Error {
 public:
  using Error::Error;
};

/// A check or solve was handed input that violates its preconditions.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Malformed expression, JSON document, or CSV payload.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace grwlab
