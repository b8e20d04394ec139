#pragma once

#include <stdexcept>
#include <string>

namespace mk {

/// Broad failure classes. The CLI maps these onto exit codes
/// (config -> 2, numerical -> 3).
enum class ErrorCategory { argument, config, numerical };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    [[nodiscard]] ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

class ArgumentError : public Error {
public:
    explicit ArgumentError(const std::string& what) : Error(ErrorCategory::argument, what) {}
};

/// Input outside the mathematical domain of an operation (e.g. psi not strictly
/// between two vacua).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ErrorCategory::argument, what) {}
};

/// A multiplier whose pairing with the kernel vanishes.
class InvalidMultiplierError : public ArgumentError {
public:
    using ArgumentError::ArgumentError;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorCategory::config, what) {}
};

class InvalidChainError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(ErrorCategory::numerical, what) {}
};

class DegenerateVacuumError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class IntegrationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class FitError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class InstabilityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NoContractionError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class UnclassifiedSectorError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A boost pulls back outside the stored slab.
class CoverageError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Exit code used by the command-line front end for an error category.
[[nodiscard]] int exit_code(ErrorCategory category) noexcept;

}  // namespace mk
