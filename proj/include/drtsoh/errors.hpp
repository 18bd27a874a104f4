#pragma once

#include <stdexcept>
#include <string>

namespace drtsoh {

/// Invalid arguments or configuration. The CLI maps this to exit code 1.
class ArgumentError : public std::invalid_argument {
public:
    explicit ArgumentError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Unreadable or malformed input data (CSV/JSON). CLI exit code 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure: non-convergence, degenerate systems. CLI exit code 3.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace drtsoh
