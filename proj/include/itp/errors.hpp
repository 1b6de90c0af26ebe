#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace itp {

// Root of the library error hierarchy.  The CLI maps InvalidArgError (and
// subclasses) to exit code 2, everything else to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller handed us something malformed: bad level, bad range, bad config.
class InvalidArgError : public Error {
 public:
  using Error::Error;
};

// Bump level below the canonical minimum of 1.
class InvalidLevelError : public InvalidArgError {
 public:
  using InvalidArgError::InvalidArgError;
};

// A product would exceed the per-piece polynomial degree cap.  Refine the
// pieces or raise the cap before retrying.
class DegreeOverflowError : public Error {
 public:
  using Error::Error;
};

// Modulation shifts frequencies; a nonzero constant part has no frequency
// slot to absorb the shift.
class UnsupportedModulationError : public Error {
 public:
  using Error::Error;
};

// Adaptive quadrature ran out of subdivisions.  Carries the best estimate
// and the error bound actually achieved so callers can report honestly.
class QuadratureFailureError : public Error {
 public:
  QuadratureFailureError(const std::string& what, std::complex<double> estimate,
                         double achieved)
      : Error(what), best_estimate(estimate), achieved_bound(achieved) {}
  std::complex<double> best_estimate;
  double achieved_bound;
};

// Level search hit the cap before meeting the deficit budget.
class HeavyTailError : public Error {
 public:
  using Error::Error;
};

// A term carries a deviation outside the requested projection window.
class WindowTooSmallError : public Error {
 public:
  using Error::Error;
};

// Element and character are built over different stabilizing sequences.
class BaseMismatchError : public Error {
 public:
  using Error::Error;
};

// A slot query went past the materialized depth of a level rule.
class DepthExceededError : public Error {
 public:
  using Error::Error;
};

// Config file problem, anchored to a 1-based line number.
class ConfigError : public InvalidArgError {
 public:
  ConfigError(const std::string& what, int line_no)
      : InvalidArgError(what), line(line_no) {}
  int line;
};

}  // namespace itp
