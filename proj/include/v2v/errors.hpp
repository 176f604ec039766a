#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace v2v {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Mismatched matrix shapes between inputs that must agree.
class StructuralError : public Error {
public:
    using Error::Error;
};

// A value outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// (n-1) * p_min exceeds p_max: no power matrix satisfies the row budgets.
class FeasibilityError : public Error {
public:
    using Error::Error;
};

// Exhaustive search would exceed the configured scale guard.
class CapacityError : public Error {
public:
    using Error::Error;
};

// Rejection sampling could not place every vehicle.
class PackingError : public Error {
public:
    using Error::Error;
};

class LoadError : public Error {
public:
    using Error::Error;
};

class ParseError : public LoadError {
public:
    using LoadError::LoadError;
};

class AsymmetryError : public LoadError {
public:
    using LoadError::LoadError;
};

class PositivityError : public LoadError {
public:
    using LoadError::LoadError;
};

// A batch run failed; carries the index of the failing trial.
class TrialError : public Error {
public:
    TrialError(std::size_t trial, const std::string& what)
        : Error("trial " + std::to_string(trial) + ": " + what), trial_(trial)
    {
    }

    std::size_t trial() const noexcept { return trial_; }

private:
    std::size_t trial_;
};

}  // namespace v2v
