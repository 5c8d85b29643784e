#pragma once

#include <stdexcept>
#include <string>

namespace fastpsf {

/// Input outside the mathematical domain of an operation (negative radius,
/// non-finite argument, out-of-range aberration coefficient, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Inconsistent or unsupported configuration (grid sizes, sampling guards,
/// mismatched raster dimensions, malformed files).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input is valid but the requested quantity is undefined for it, e.g.
/// normalizing an all-zero raster.
class DegenerateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const std::string& what)
{
    if (!ok) throw DomainError(what);
}

inline void require_config(bool ok, const std::string& what)
{
    if (!ok) throw ConfigError(what);
}

} // namespace detail
} // namespace fastpsf
