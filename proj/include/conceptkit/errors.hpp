#pragma once

#include <stdexcept>
#include <string>

namespace conceptkit {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid or inconsistent data: malformed files, dimension mismatches,
// arguments outside their domain. The CLI maps these to exit code 2.
class DataError : public Error {
public:
    using Error::Error;
};

class FormatError : public DataError {
public:
    using DataError::DataError;
};

class DimensionError : public DataError {
public:
    using DataError::DataError;
};

class DomainError : public DataError {
public:
    using DataError::DataError;
};

class IoError : public DataError {
public:
    using DataError::DataError;
};

// Decomposition or solve failed to converge (CLI exit code 3).
class NumericError : public Error {
public:
    using Error::Error;
};

} // namespace conceptkit
