#pragma once

#include <stdexcept>
#include <string>

namespace aam {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Scenario / config document failed validation. Message names the offending entity.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A model could not be solved (infeasible, unbounded, budget exhausted).
class SolveError : public Error {
public:
    using Error::Error;
};

/// Two fixed-schedule priority flights cannot both be accommodated.
class PopupConflictError : public SolveError {
public:
    PopupConflictError(const std::string& a, const std::string& b, const std::string& what)
        : SolveError(what), flight_a(a), flight_b(b) {}
    std::string flight_a;
    std::string flight_b;
};

}  // namespace aam
