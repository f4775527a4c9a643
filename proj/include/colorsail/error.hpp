#pragma once

#include <stdexcept>
#include <string>

namespace colorsail {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition (bad parameter, malformed file).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

class InvalidSubdivision : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class DomainError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// A histogram or weight set with zero total mass.
class EmptyDistribution : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// Optimization produced NaN/Inf and could not recover.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace colorsail
