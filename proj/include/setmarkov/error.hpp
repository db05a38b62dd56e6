#pragma once

#include <stdexcept>
#include <string>

namespace setmarkov {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inputs that do not fit together (grid mismatch, bad parameters, malformed sets).
class ConfigurationError : public Error {
public:
    using Error::Error;
};

/// The requested operation exists but not for this kind of process.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

/// A target set cannot be written as a union of the available left neighbourhoods.
class DecompositionError : public Error {
public:
    using Error::Error;
};

/// A combinatorial or tabular size cap was exceeded.
class CapacityError : public Error {
public:
    using Error::Error;
};

} // namespace setmarkov
