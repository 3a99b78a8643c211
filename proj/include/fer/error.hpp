#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fer {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file; carries the 1-based line number (0 when not tied to a line).
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A degree distribution with zero mean reached an excess-degree generating function.
class ZeroMeanDegree : public Error {
public:
    ZeroMeanDegree() : Error("degree distribution has zero mean degree") {}
};

/// In- and out-degree distributions describe different edge counts.
class InconsistentMeans : public Error {
public:
    InconsistentMeans(double mean_in, double mean_out)
        : Error("inconsistent mean degrees: in=" + std::to_string(mean_in) +
                " out=" + std::to_string(mean_out)) {}
};

/// Generator parameters that cannot be realized.
class InfeasibleSpec : public Error {
public:
    using Error::Error;
};

/// Real value that does not map exactly into the prime field.
class NotRepresentable : public Error {
public:
    using Error::Error;
};

/// Instance exceeds the size bound of an exhaustive or dense operation.
class TooLarge : public Error {
public:
    using Error::Error;
};

}  // namespace fer
