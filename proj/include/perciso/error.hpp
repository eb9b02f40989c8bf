#pragma once

#include <stdexcept>
#include <string>

namespace perciso {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad argument value (maps to CLI exit code 2).
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Input is well-formed but outside the operation's domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Requested box does not fit the addressable vertex space.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// Corrupt or mismatching file contents (maps to CLI exit code 3).
class DataError : public Error {
public:
    using Error::Error;
};

}  // namespace perciso
