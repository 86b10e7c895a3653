#pragma once

#include <stdexcept>
#include <string>

namespace fded {

// Raster dimensions disagree where they must match.
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid parameter value (even window width, non-positive sigma, ...).
struct ParamError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Malformed file payload or header.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid configuration, manifest or scene spec.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite values encountered during computation.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace fded
