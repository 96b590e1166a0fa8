#ifndef HEUN_ERRORS_HPP
#define HEUN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace heun {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two roots coincide (exactly, or within the caller's tolerance).
class DegenerateRoots : public Error {
 public:
  using Error::Error;
};

/// A root sits on (or too close to) a zero of X.
class PoleAtRoot : public Error {
 public:
  using Error::Error;
};

/// Polynomial degrees or list lengths do not match the equation shape.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class DomainViolation : public Error {
 public:
  using Error::Error;
};

class NotNormalizable : public Error {
 public:
  using Error::Error;
};

class DegenerateCubicRoot : public Error {
 public:
  using Error::Error;
};

class UnsupportedOrder : public Error {
 public:
  using Error::Error;
};

/// Two evaluations that must agree identically did not.
class InternalMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace heun

#endif  // HEUN_ERRORS_HPP
