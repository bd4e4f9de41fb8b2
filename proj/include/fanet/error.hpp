#pragma once

#include <stdexcept>
#include <string>

namespace fanet {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Scenario or config file is invalid. Raised before any event runs.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

class UnknownMcsError : public DomainError {
public:
    using DomainError::DomainError;
};

// Token handling violated a protocol precondition (wrong addressee, bad table length).
class ProtocolError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// A runtime invariant check failed while the engine was verifying itself.
class InvariantViolation : public Error {
public:
    using Error::Error;
};

}  // namespace fanet
