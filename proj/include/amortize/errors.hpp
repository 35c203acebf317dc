#pragma once

#include <stdexcept>
#include <string>

namespace amortize {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operands with incompatible shapes.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A precondition of an operation was violated by the caller.
class ContractError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed user data (CSV rows, trial tables).
class DataError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration document or mismatched checkpoint kind.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Non-finite values where finite ones are required.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Failure inside an optimization loop (NaN gradients, too many simulator timeouts).
class TrainingError : public Error {
public:
    using Error::Error;
};

/// Checkpoint bytes do not match their checksum or are truncated.
class CorruptionError : public Error {
public:
    using Error::Error;
};

class UnsupportedVersionError : public Error {
public:
    using Error::Error;
};

}  // namespace amortize
