// errors.hpp - Exception types raised by the qchain library

#pragma once

#include <stdexcept>
#include <string>

namespace qchain {

/// Base class of every error thrown by the library. Each subclass corresponds to
/// one failure mode so callers (the CLI in particular) can map them to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (nonpositive
/// frequency, N < 2, etc.).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Drift matrix has an eigenvalue with nonnegative real part: no steady state.
class NonHurwitzError : public Error {
public:
    using Error::Error;
};

/// Linear system of a steady-state solve is numerically singular.
class SolverSingularError : public Error {
public:
    using Error::Error;
};

/// Covariance matrix violates the uncertainty principle.
class UnphysicalError : public Error {
public:
    using Error::Error;
};

/// Operation only defined for a particular chain shape (N = 2, eta = 0, ...).
class WrongShapeError : public Error {
public:
    using Error::Error;
};

/// Truncated Hilbert space or superoperator exceeds the configured memory budget.
class DimensionBudgetError : public Error {
public:
    using Error::Error;
};

/// Liouvillian kernel is more than one-dimensional.
class DegenerateKernelError : public Error {
public:
    using Error::Error;
};

/// Heat/work triple does not match any operating regime.
class InconsistentSignsError : public Error {
public:
    using Error::Error;
};

/// Too few samples for an extrapolation.
class InsufficientSamplesError : public Error {
public:
    using Error::Error;
};

} // namespace qchain
