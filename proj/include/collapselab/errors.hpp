#pragma once

#include <stdexcept>
#include <string>

namespace collapselab {

/// Precondition or malformed-value failure (non-finite input, bad dimension, ...).
struct InvalidInputError : std::invalid_argument {
    explicit InvalidInputError(const std::string& what) : std::invalid_argument(what) {}
};

/// A requested construction has no solution (e.g. a Gram matrix that is not PSD).
struct InfeasibleError : std::runtime_error {
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical breakdown inside an otherwise valid computation.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Iterative training diverged.
struct TrainingFailureError : std::runtime_error {
    explicit TrainingFailureError(const std::string& what) : std::runtime_error(what) {}
};

/// A class has too few samples to fit the requested model.
struct DegenerateClassError : std::runtime_error {
    explicit DegenerateClassError(const std::string& what) : std::runtime_error(what) {}
};

/// Bad or inconsistent run configuration.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem / serialization failure.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace collapselab
