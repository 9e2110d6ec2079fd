// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace splat360 {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad argument or configuration value.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// A Gaussian primitive that violates its invariants (e.g. singular covariance).
class InvalidPrimitiveError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent input file.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Non-finite values or other numeric breakdown.
class NumericError : public Error {
public:
    using Error::Error;
};

} // namespace splat360
