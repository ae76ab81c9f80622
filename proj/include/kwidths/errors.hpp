#pragma once

#include <stdexcept>
#include <string>

namespace kwidths {

// Base class for all library-specific failures so callers can catch one type.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A series did not meet its relative-tail stopping criterion within max_terms.
class TruncationError : public Error {
 public:
  explicit TruncationError(const std::string& msg) : Error(msg) {}
};

// The bracketing scan for the theta root found no sign change.
class NoSignChangeError : public Error {
 public:
  explicit NoSignChangeError(const std::string& msg) : Error(msg) {}
};

// The bracketing scan found more than one candidate root; uniqueness is
// assumed, so this is reported rather than silently repaired.
class AmbiguousBracketError : public Error {
 public:
  explicit AmbiguousBracketError(const std::string& msg) : Error(msg) {}
};

// The spline interpolation matrix is numerically singular.
class SplineNotUniqueError : public Error {
 public:
  explicit SplineNotUniqueError(const std::string& msg) : Error(msg) {}
};

// sin(n*y0 - beta*pi/2) is too close to zero to assign the sign s.
class DegenerateSignError : public Error {
 public:
  explicit DegenerateSignError(const std::string& msg) : Error(msg) {}
};

// The requested computation would need 1/q^n beyond the supported envelope.
class RangeUnsupportedError : public Error {
 public:
  explicit RangeUnsupportedError(const std::string& msg) : Error(msg) {}
};

// A sign-change counter was given an all-zero vector.
class AllZerosError : public Error {
 public:
  explicit AllZerosError(const std::string& msg) : Error(msg) {}
};

}  // namespace kwidths
