#pragma once

#include <stdexcept>
#include <string>

namespace tumorfb {

/// Raised for inputs that violate an operation's preconditions.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical procedure cannot produce a trustworthy result
/// (bracket without a sign change, singular tridiagonal pivot, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace tumorfb
