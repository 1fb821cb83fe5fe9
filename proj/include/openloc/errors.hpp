#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace openloc {

// Base of every error raised by the library. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid argument value or violated precondition.
class DomainError : public Error {
public:
    using Error::Error;
};

// Shapes that do not agree (non-square matrix, mismatched vector length).
class DimensionError : public Error {
public:
    using Error::Error;
};

// Iterative method ran out of iterations.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

// Invalid geometric configuration: a loop that touches an exceptional
// point, a chord leaving the billiard, collapsed bounce points.
class GeometryError : public Error {
public:
    using Error::Error;
};

// Eigenvalue continuation could not tell the two branches apart.
class StepRefinementError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace openloc
