#pragma once

#include <stdexcept>
#include <string>

namespace ricci_lab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed arguments: dimension mismatch, point outside a chart, k out of range.
class InputError : public Error {
public:
    using Error::Error;
};

/// Singular metric, parallel vectors, rank-deficient frame.
class DegeneracyError : public Error {
public:
    using Error::Error;
};

/// A tensor that should carry algebraic symmetries does not.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// Parameter combination for which no construction exists.
class InfeasibilityError : public Error {
public:
    using Error::Error;
};

/// A construction finished but one of its certificates has a non-positive margin.
class ConstructionError : public Error {
public:
    using Error::Error;
};

/// Deformation parameters violate one of the admissibility inequalities.
class AdmissibilityError : public Error {
public:
    using Error::Error;
};

/// A bound was invoked outside the regime it covers.
class PreconditionError : public Error {
public:
    using Error::Error;
};

} // namespace ricci_lab
