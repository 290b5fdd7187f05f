#ifndef DIABNET_ERRORS_HPP
#define DIABNET_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace diabnet {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Incompatible matrix/vector dimensions. Messages name both shapes.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Malformed input file contents (CSV cell, JSON document).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Dataset header does not satisfy the schema.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Target token cannot be mapped to a binary label, or a label is out of range.
class LabelError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration value (layer sizes, batch sizes, option strings, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A column is unusable for the requested operation (zero variance, all-zero).
class DegenerateColumnError : public Error {
public:
    using Error::Error;
};

/// Operation received no data where at least one element is required.
class EmptyInputError : public Error {
public:
    using Error::Error;
};

/// A stratified split or fold plan cannot be built from the given class sizes.
class SplitError : public Error {
public:
    using Error::Error;
};

/// Training produced a non-finite loss or parameter.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& msg, std::size_t epoch, std::size_t batch)
        : Error(msg), epoch(epoch), batch(batch) {}

    std::size_t epoch = 0;
    std::size_t batch = 0;
};

} // namespace diabnet

#endif // DIABNET_ERRORS_HPP
