#pragma once

#include <stdexcept>
#include <string>

namespace swipt {

// Bad dimensions, out-of-range arguments, invalid configuration values.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Unreadable files, corrupt checkpoints, malformed CSV.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Training could not produce a usable model (every restart diverged).
class TrainingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace swipt
