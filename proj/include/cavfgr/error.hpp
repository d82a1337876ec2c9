// error.hpp: exception types shared by every module.
//
// ConfigError covers bad inputs (schema violations, invalid parameters);
// NumericalError covers failures during evaluation (overflow, quadrature
// non-convergence, unstable Hessians). The CLI maps them to exit codes 2 and 3.

#pragma once

#include <stdexcept>
#include <string>

namespace cavfgr {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cavfgr
