#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gyre {

/// Input outside the region where a model or map is defined.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Evaluation at a point where a quantity is undefined (e.g. angle at the center).
class DegeneratePointError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Interpolation or fitting system could not be solved.
class SingularSystemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class RankDeficiencyError : public SingularSystemError {
public:
    using SingularSystemError::SingularSystemError;
};

/// Malformed input file. Carries the 1-based line number when known.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace gyre
