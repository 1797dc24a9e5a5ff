#pragma once

#include <stdexcept>
#include <string>

namespace regpot {

// Every error carries the module that raised it so the CLI can report
// "module: message" without further bookkeeping.
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& what)
        : std::runtime_error(module + ": " + what), module_(std::move(module)) {}

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

// Inputs outside the documented contract.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Mathematically undefined evaluation (e.g. a singular point).
class DomainError : public Error {
public:
    using Error::Error;
};

// Algorithm failed to reach its accuracy target, or a post-condition
// that should follow from valid inputs did not hold.
class NumericalError : public Error {
public:
    using Error::Error;
};

// A CLI stage was invoked before the stage producing its input.
class DependencyError : public Error {
public:
    using Error::Error;
};

}  // namespace regpot
