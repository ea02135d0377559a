#pragma once

#include <stdexcept>
#include <string>

#include "fiberguide/vec3.hpp"

namespace fiberguide {

/// Argument outside the mathematical domain of a conversion (negative
/// temperature, negative power, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Configuration or integrator parameters that violate a stated bound.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Non-finite force or state encountered during integration.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, const Vec3& position)
        : std::runtime_error(what + " at position " + to_string(position)),
          position_(position) {}

    const Vec3& position() const noexcept { return position_; }

private:
    Vec3 position_;
};

/// Configuration ingestion failure; names the offending key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(field) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    IoError(const std::string& path, const std::string& message)
        : std::runtime_error(path + ": " + message), path_(path) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

} // namespace fiberguide
