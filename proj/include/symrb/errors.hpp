#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace symrb {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree (or a square matrix was required).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A value violates the invariant of the type it is being wrapped in.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Input lies outside the region where an operation is defined (e.g. the
/// norm bound of the skew arcsinh).
class OutOfRangeError : public DomainError {
public:
    using DomainError::DomainError;
};

class NumericalFailure : public Error {
public:
    using Error::Error;
};

class NonConvergenceError : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

/// Two phase points do not share a J level set.
class NotSameLevelSetError : public DomainError {
public:
    using DomainError::DomainError;
};

/// A phase point is not of the form produced by the lift (Q, P orthogonal).
class NotALiftError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Integration produced a non-finite state.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, std::size_t step)
        : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// The symmetric-representation flow left the full-rank set.
class RankLossError : public DivergenceError {
public:
    using DivergenceError::DivergenceError;
};

}  // namespace symrb
