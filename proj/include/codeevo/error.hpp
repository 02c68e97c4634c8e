#pragma once

#include <stdexcept>
#include <string>

namespace codeevo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Input data violates a schema or lineage rule.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Invalid argument passed to a numerical or rendering routine.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Python source could not be tokenized or parsed.
class ParseError : public Error {
public:
    ParseError(int line, int column, const std::string& message)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line_(line),
          column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

}  // namespace codeevo
