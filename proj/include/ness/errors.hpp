#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace ness {

// Base class for all library errors. CLI maps subclasses to exit codes:
// ValidationError -> 2, NumericalError -> 3.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
    virtual const char* kind() const noexcept { return "error"; }
};

// Bad input: invariant violations, malformed model files, unusable arguments.
class ValidationError : public Error {
  public:
    using Error::Error;
    const char* kind() const noexcept override { return "validation"; }
};

class ModelTooSmallError : public ValidationError {
  public:
    using ValidationError::ValidationError;
    const char* kind() const noexcept override { return "model-too-small"; }
};

// Generator has couplings the requested routine cannot handle (e.g. even
// Majorana couplings in the odd-only criticality machinery).
class UnsupportedGeneratorError : public ValidationError {
  public:
    using ValidationError::ValidationError;
    const char* kind() const noexcept override { return "unsupported-generator"; }
};

// A numerical routine could not reach its target tolerance.
class NumericalError : public Error {
  public:
    NumericalError(const std::string& msg, double achieved = 0.0)
        : Error(msg), achieved_error(achieved) {}
    const char* kind() const noexcept override { return "numerical"; }
    double achieved_error;
};

class ToleranceNotMetError : public NumericalError {
  public:
    using NumericalError::NumericalError;
    const char* kind() const noexcept override { return "tolerance-not-met"; }
};

class IntegrationFailureError : public NumericalError {
  public:
    using NumericalError::NumericalError;
    const char* kind() const noexcept override { return "integration-failure"; }
};

// Steady-state equation is singular: an eigenvalue pair of the damping matrix
// sums to (numerically) zero while the driving term does not vanish there.
class DegenerateSteadyStateError : public NumericalError {
  public:
    DegenerateSteadyStateError(const std::string& msg, std::complex<double> a,
                               std::complex<double> b)
        : NumericalError(msg), lambda_a(a), lambda_b(b) {}
    const char* kind() const noexcept override { return "degenerate-steady-state"; }
    std::complex<double> lambda_a, lambda_b;
};

class FitWindowError : public ValidationError {
  public:
    using ValidationError::ValidationError;
    const char* kind() const noexcept override { return "fit-window"; }
};

class IllConditionedError : public NumericalError {
  public:
    using NumericalError::NumericalError;
    const char* kind() const noexcept override { return "ill-conditioned"; }
};

class NoSolutionError : public NumericalError {
  public:
    using NumericalError::NumericalError;
    const char* kind() const noexcept override { return "no-solution"; }
};

} // namespace ness
