#pragma once

#include <stdexcept>
#include <string>

namespace ulab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller supplied an argument outside the operation's domain
/// (non-finite values, wrong sizes, negative mesh, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Operation is defined only for a restricted set of dimensions.
class UnsupportedDimension : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// The weight passed to the Virial identity is not a sum of per-axis weights.
class UnsupportedWeight : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// A finite sequence violates the Dirichlet constraint u_{-N} = u_N = 0.
class ConstraintViolation : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Finite case requested with too few nodes.
class TooSmall : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Numerical failure: the inputs are valid but the requested quantity
/// cannot be produced to the promised accuracy.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Unscaled Bessel values do not fit in a double; use the ratio or the
/// exponentially scaled form instead.
class Overflow : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A box radius too small for the sequence being truncated onto it.
class TruncationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Zero input (or zero normalization quantity) where a nonzero one is needed.
class DegenerateInput : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A continued-fraction convergent has a zero denominator.
class DegenerateFraction : public NumericalError {
 public:
  DegenerateFraction(const std::string& what, std::size_t index)
      : NumericalError(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// The operator whose kernel defines a minimizer does not have a
/// one-dimensional kernel.
class AmbiguousMinimizer : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace ulab
