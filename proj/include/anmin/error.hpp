#pragma once

#include <stdexcept>
#include <string>

namespace anmin {

// Maps onto the CLI exit codes: config = 1, data = 2, numerical = 3.
enum class ErrorKind { config = 1, data = 2, numerical = 3 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& what)
        : Error(ErrorKind::config, "dimension mismatch: " + what) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

class ParseError : public DataError {
public:
    ParseError(const std::string& what, long row, long column)
        : DataError(what + " (row " + std::to_string(row) + ", column " + std::to_string(column) + ")"),
          row_(row), column_(column) {}
    long row() const noexcept { return row_; }
    long column() const noexcept { return column_; }

private:
    long row_;
    long column_;
};

class MissingColumn : public DataError {
public:
    explicit MissingColumn(const std::string& name) : DataError("missing column '" + name + "'") {}
};

class NotBinary : public DataError {
public:
    explicit NotBinary(const std::string& what) : DataError(what) {}
};

class EmptyShape : public DataError {
public:
    explicit EmptyShape(const std::string& what) : DataError(what) {}
};

class ImageTooSmall : public DataError {
public:
    explicit ImageTooSmall(const std::string& what) : DataError(what) {}
};

class DegenerateTargets : public DataError {
public:
    explicit DegenerateTargets(const std::string& what) : DataError(what) {}
};

class UnpairedRuns : public DataError {
public:
    explicit UnpairedRuns(const std::string& what) : DataError(what) {}
};

class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

class SingularMatrix : public NumericalError {
public:
    explicit SingularMatrix(const std::string& what) : NumericalError(what) {}
};

class NoConvergence : public NumericalError {
public:
    explicit NoConvergence(const std::string& what) : NumericalError(what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::data, what) {}
};

}  // namespace anmin
