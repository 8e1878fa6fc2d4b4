#pragma once

#include <stdexcept>
#include <string>

namespace carbcast {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Bad configuration or usage (CLI exit code 1).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Problems with input data: files, schemas, dates, gaps (CLI exit code 2).
class DataError : public Error {
public:
    using Error::Error;
};

class SchemaError : public DataError {
public:
    using DataError::DataError;
};

class OrderingError : public DataError {
public:
    using DataError::DataError;
};

class ParseError : public DataError {
public:
    using DataError::DataError;
};

class InsufficientDataError : public DataError {
public:
    using DataError::DataError;
};

class UnusableColumnError : public DataError {
public:
    using DataError::DataError;
};

class DataGapError : public DataError {
public:
    using DataError::DataError;
};

/// Numerical failures: degenerate inputs, domain violations, divergence
/// (CLI exit code 3).
class NumericError : public Error {
public:
    using Error::Error;
};

class DegenerateSeriesError : public NumericError {
public:
    using NumericError::NumericError;
};

class DomainError : public NumericError {
public:
    using NumericError::NumericError;
};

class NonStationaryError : public NumericError {
public:
    using NumericError::NumericError;
};

class TrainingDivergedError : public NumericError {
public:
    using NumericError::NumericError;
};

class ShapeError : public NumericError {
public:
    using NumericError::NumericError;
};

} // namespace carbcast
