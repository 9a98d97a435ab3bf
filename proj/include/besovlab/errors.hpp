#pragma once

#include <stdexcept>
#include <string>

namespace besovlab {

// Bad inputs: malformed configs, out-of-contract arguments.  CLI exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Work refused because it would exceed a hard budget (bin count, memory).
class ResourceError : public ValidationError {
public:
    explicit ResourceError(const std::string& msg) : ValidationError(msg) {}
};

// Requested combination is out of scope (dimension too high, no closed form).
class UnsupportedError : public ValidationError {
public:
    explicit UnsupportedError(const std::string& msg) : ValidationError(msg) {}
};

// Runtime numerical failure: factorization breakdown, non-finite field values.
// CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace besovlab
