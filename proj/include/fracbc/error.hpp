#pragma once

#include <stdexcept>
#include <string>

namespace fracbc {

/// Invalid parameters or an inconsistent configuration. The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed (singular spectrum, non-convergence). Exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool cond, const std::string& what) {
    if (!cond) throw ConfigError(what);
}

} // namespace detail
} // namespace fracbc
