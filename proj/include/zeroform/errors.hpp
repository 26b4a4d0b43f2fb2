#pragma once

#include <stdexcept>
#include <string>

namespace zeroform {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (dimension mismatches, non-finite entries, ...).
class InvalidInputError : public Error {
   public:
    using Error::Error;
};

/// A matrix required to be invertible is singular or too ill-conditioned.
class SingularMatrixError : public Error {
   public:
    SingularMatrixError(const std::string& what, double condition_estimate)
        : Error(what), condition_estimate(condition_estimate) {}
    double condition_estimate;
};

/// An iterative numerical routine (eigensolver) failed to converge.
class NumericalFailureError : public Error {
   public:
    using Error::Error;
};

/// An output row never sees any input through the dynamics.
class UndefinedRelativeDegreeError : public Error {
   public:
    UndefinedRelativeDegreeError(const std::string& what, int output_index)
        : Error(what), output_index(output_index) {}
    int output_index;
};

/// The invariant zero decomposition does not exist for this system.
class DecompositionNotApplicableError : public Error {
   public:
    using Error::Error;
};

/// A transformed realization violates the expected sparse structure.
class StructureViolationError : public Error {
   public:
    StructureViolationError(const std::string& what, double residual)
        : Error(what), residual(residual) {}
    double residual;
};

/// The determinant-interpolation oracle cannot be applied (degenerate pencil).
class OracleNotApplicableError : public Error {
   public:
    using Error::Error;
};

/// Every computed candidate failed the pencil rank-drop verification.
class VerificationFailureError : public Error {
   public:
    using Error::Error;
};

/// No computation path produced a usable answer.
class MethodFailureError : public Error {
   public:
    using Error::Error;
};

/// Malformed system document.
class ParseError : public Error {
   public:
    using Error::Error;
};

}  // namespace zeroform
