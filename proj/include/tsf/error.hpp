#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tsf {

/// Incompatible tensor or matrix shapes.
class ShapeError : public std::runtime_error {
public:
    explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input data (bad token, bad calendar field, ...).
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Input does not match the expected schema (header, column names).
class SchemaError : public std::runtime_error {
public:
    explicit SchemaError(const std::string& msg) : std::runtime_error(msg) {}
};

/// An API precondition was violated by the caller.
class ContractError : public std::runtime_error {
public:
    explicit ContractError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad configuration file or option value.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Data is structurally valid but unusable (empty split, zero rows, ...).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Training produced a non-finite loss.
class DivergedError : public std::runtime_error {
public:
    DivergedError(std::size_t epoch, std::size_t batch, const std::string& msg)
        : std::runtime_error(msg), epoch(epoch), batch(batch) {}
    std::size_t epoch;
    std::size_t batch;
};

}  // namespace tsf
