#pragma once

#include <stdexcept>
#include <string>

namespace qspirl {

/// Caller misuse: bad arguments, out-of-range fields, contract violations.
struct UsageError : std::invalid_argument {
    explicit UsageError(const std::string &msg) : std::invalid_argument(msg) {}
};

/// Invalid configuration (e.g. more obstacles than free cells).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string &msg) : std::runtime_error(msg) {}
};

/// Training diverged (non-finite loss or gradients).
struct TrainingError : std::runtime_error {
    explicit TrainingError(const std::string &msg) : std::runtime_error(msg) {}
};

/// Malformed model / table / trajectory file.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string &msg) : std::runtime_error(msg) {}
};

} // namespace qspirl
