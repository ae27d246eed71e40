#pragma once

#include <stdexcept>
#include <string>

namespace rmtfin {

// Error categories map one-to-one onto the status codes of the C API and the
// exit codes of the command-line tool.

class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed input file. `line` is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line)
    {
    }
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Quadrature failure, ill-conditioned covariance, non-convergent iteration.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input data that is well-formed but cannot support the computation
// (zero-variance series, non-positive prices, singular blocks).
class DegenerateData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Root finding had no solution inside the attainable range.
class NoSolution : public std::runtime_error {
public:
    NoSolution(const std::string& what, double lo, double hi)
        : std::runtime_error(what), lo_(lo), hi_(hi)
    {
    }
    double lower() const noexcept { return lo_; }
    double upper() const noexcept { return hi_; }

private:
    double lo_;
    double hi_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace rmtfin
