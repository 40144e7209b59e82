// Copyright 2026 The randstep Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace randstep {

/// Base of all errors raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or index outside the admissible range.
class IndexError : public Error {
  public:
    using Error::Error;
};

/// Function evaluated outside its domain of definition.
class DomainError : public Error {
  public:
    using Error::Error;
};

/// Numerical failures. The CLI maps these to exit code 2.
class NumericalError : public Error {
  public:
    using Error::Error;
};

/// Newton iteration could not reduce the residual below tolerance.
class NonConvergence : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

/// Implicit step requested with k * nu >= 1.
class StepRestrictionViolated : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

/// Zero pivot in a triangular or tridiagonal solve.
class SingularMatrix : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

/// Log-log fit over a window containing non-positive errors or too few rows.
class FitError : public Error {
  public:
    using Error::Error;
};

}  // namespace randstep
