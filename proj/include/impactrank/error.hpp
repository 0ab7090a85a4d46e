#pragma once

#include <stdexcept>
#include <string>

namespace impactrank {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input file or record. Carries a human-readable location.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Input parsed but violates a structural rule (duplicate ids, dangling references, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Argument outside the operation's domain (t < 1, empty vector, non-finite value, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Entity does not satisfy an age or history requirement for the requested computation.
class EligibilityError : public Error {
public:
    using Error::Error;
};

/// Statistically degenerate input (zero variance, fewer than two points, ...).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// Iterative solver failed to reach tolerance within its sweep budget.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

}  // namespace impactrank
