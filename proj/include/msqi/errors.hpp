#pragma once

#include <stdexcept>
#include <string>

namespace msqi {

/// Base class for all library failures.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid argument or configuration value.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// No site lies within the support radius of a query point. Signals an
/// under-resolved support radius; callers must not fall back silently.
class EmptyNeighborhoodError : public Error {
public:
    using Error::Error;
};

/// The local Gram system is too ill-conditioned to trust (degenerate
/// site geometry for the requested polynomial degree).
class NonUnisolventError : public Error {
public:
    using Error::Error;
};

/// Logarithm map requested at (or numerically too close to) the cut locus.
class CutLocusError : public Error {
public:
    using Error::Error;
};

/// Fixed-point iteration exhausted its iteration budget.
class NonConvergenceError : public Error {
public:
    NonConvergenceError(const std::string& what, double residual)
        : Error(what), last_residual(residual) {}
    double last_residual;
};

/// File or stream I/O failure.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace msqi
