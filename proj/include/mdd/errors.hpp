#pragma once

#include <stdexcept>
#include <string>

namespace mdd {

// Malformed or inconsistent input data (bad files, shape mismatches,
// out-of-range parameters supplied by the caller).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure inside an otherwise valid computation (singular
// covariance that regularization cannot repair, degenerate fits).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace mdd
