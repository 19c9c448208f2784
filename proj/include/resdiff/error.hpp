#pragma once

#include <stdexcept>

namespace resdiff {

struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when a training step produces a non-finite loss.
struct TrainingDivergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace resdiff
