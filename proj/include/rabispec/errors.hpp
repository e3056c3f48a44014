// errors.hpp: Exception types shared by all rabispec modules

#pragma once

#include <stdexcept>
#include <string>

namespace rabispec {

/// Invalid physical parameter or argument outside an operation's domain.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not deliver its contract (tolerance, resonance, decay).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A retained perturbative denominator fell below the resonance guard.
class NearResonanceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Quadrature or series did not reach the requested tolerance.
class ToleranceError : public NumericalError {
public:
    ToleranceError(const std::string& what, double achieved)
        : NumericalError(what + " (achieved error " + std::to_string(achieved) + ")")
        , achieved_(achieved) {}

    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

/// Malformed or inconsistent run configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace rabispec
