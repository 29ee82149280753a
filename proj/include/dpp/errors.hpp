#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dpp {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Syntax error in a process document. Line and column are 1-based; 0 means unknown.
class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& message)
        : Error(format(line, column, message)), line_(line), column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    static std::string format(std::size_t line, std::size_t column, const std::string& message) {
        if (line == 0) {
            return message;
        }
        return std::to_string(line) + ":" + std::to_string(column) + ": " + message;
    }

    std::size_t line_;
    std::size_t column_;
};

/// Undeclared or duplicate names, target outside the value set, and similar.
class ValidationError : public Error {
public:
    using Error::Error;
};

class FragmentMismatch : public Error {
public:
    using Error::Error;
};

/// A configured cap (iterations, product states, enumeration size) was hit.
/// Never used to signal a genuine negative answer.
class ResourceExceeded : public Error {
public:
    using Error::Error;
};

class AlphabetError : public Error {
public:
    using Error::Error;
};

class InvalidHypothesis : public Error {
public:
    using Error::Error;
};

class NotFlat : public Error {
public:
    using Error::Error;
};

}  // namespace dpp
