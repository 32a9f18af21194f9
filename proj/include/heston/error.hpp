#pragma once

#include <stdexcept>
#include <string>

namespace heston {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: parameters, option specs, configuration. The CLI maps these to exit code 1.
class ValidationError : public Error {
public:
    using Error::Error;
};

class FellerViolation : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class RangeError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class BarrierError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class UnknownCase : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class DomainError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Failures of the numerics themselves. The CLI maps these to exit code 2.
class NumericalError : public Error {
public:
    using Error::Error;
};

class SingularMatrix : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class AssemblyError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateFit : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class IndexError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DimensionError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace heston
