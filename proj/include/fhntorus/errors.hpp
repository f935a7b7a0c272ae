#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fhntorus {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const noexcept { return 3; }
};

// Input validation failures. The CLI maps these to exit code 2.
class ValidationError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

class DimensionError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Lattice size is not an odd prime.
class LatticeSizeError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A precondition on parameter values does not hold.
class DomainError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class ClassificationError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Numerical failures. The CLI maps these to exit code 3.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Root finder found no sign change in its bracket.
class BracketError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class StiffnessError : public NumericalError {
public:
    StiffnessError(const std::string& what, double time)
        : NumericalError(what + " at t = " + std::to_string(time)), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

/// A flow-invariant subspace was left by more than roundoff.
class InvariantError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class IoError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Non-fatal diagnostic attached to results.
struct Warning {
    std::string code;
    std::string message;

    friend bool operator==(const Warning&, const Warning&) = default;
};

using Warnings = std::vector<Warning>;

}  // namespace fhntorus
