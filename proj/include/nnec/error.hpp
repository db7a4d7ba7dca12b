#ifndef NNEC_ERROR_HPP
#define NNEC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace nnec {

/// Bad input or parameters. Maps to CLI exit code 2.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A cell of a delimited file failed to parse. Rows and columns are 1-based
/// as a text editor shows them (the header row, if any, counts as row 1).
class ParseError : public ValidationError {
public:
    ParseError(std::size_t row, std::size_t column, const std::string& detail, const std::string& source = {})
        : ValidationError((source.empty() ? std::string() : source + ": ") + "row " + std::to_string(row) +
                          ", column " + std::to_string(column) + ": " + detail),
          row_(row), column_(column), detail_(detail) {}

    std::size_t row() const { return row_; }
    std::size_t column() const { return column_; }
    const std::string& detail() const { return detail_; }

private:
    std::size_t row_;
    std::size_t column_;
    std::string detail_;
};

/// File could not be opened, read or written. Maps to CLI exit code 3.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Broken internal invariant. Maps to CLI exit code 4.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace nnec

#endif  // NNEC_ERROR_HPP
