#pragma once

#include <stdexcept>
#include <string>

namespace aptsp {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range input (CLI exit code 1).
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A hard size or work limit was exceeded (CLI exit code 2).
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

/// The LP engine could not reach a trustworthy answer.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

}  // namespace aptsp
