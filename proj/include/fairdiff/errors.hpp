// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace fairdiff {

// Invalid hyperparameter or malformed run configuration.
struct ConfigError : std::invalid_argument {
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Mismatched vector/matrix dimensions between caller and callee.
struct ShapeError : std::invalid_argument {
    explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

// Argument outside the mathematical domain of an operation (e.g. sigma <= 0).
struct DomainError : std::domain_error {
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// A batch with no classified samples has no defined class ratio.
struct UndefinedRatioError : std::runtime_error {
    explicit UndefinedRatioError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite loss or gradient encountered during optimization.
struct TrainingError : std::runtime_error {
    explicit TrainingError(const std::string& what) : std::runtime_error(what) {}
};

// File could not be read or written.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fairdiff
