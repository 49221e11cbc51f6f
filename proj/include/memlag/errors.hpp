#pragma once

#include <stdexcept>
#include <string>

namespace memlag {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A curve was evaluated outside its declared domain.
class DomainError : public Error {
public:
    DomainError(std::string curve, double x, const std::string& what)
        : Error(what), curve_(std::move(curve)), x_(x) {}

    [[nodiscard]] const std::string& curve() const noexcept { return curve_; }
    [[nodiscard]] double x() const noexcept { return x_; }

private:
    std::string curve_;
    double x_;
};

/// An inverse was requested for a value outside the curve's range.
class RangeError : public Error {
public:
    using Error::Error;
};

/// Invalid curve or element construction.
class DefinitionError : public Error {
public:
    using Error::Error;
};

/// Netlist syntax error, located in the input.
class ParseError : public Error {
public:
    ParseError(int line, int column, const std::string& message)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
          line_(line), column_(column), message_(message) {}

    [[nodiscard]] int line() const noexcept { return line_; }
    [[nodiscard]] int column() const noexcept { return column_; }
    [[nodiscard]] const std::string& message() const noexcept { return message_; }

private:
    int line_;
    int column_;
    std::string message_;
};

/// Assembly was asked for a circuit it cannot represent.
class FormulationError : public Error {
public:
    using Error::Error;
};

/// Failure inside a numerical procedure (singular blocks, Newton failure,
/// step underflow, non-finite values).
class NumericError : public Error {
public:
    using Error::Error;
};

} // namespace memlag
