#pragma once

#include <stdexcept>

namespace s2sl {

// Dimension disagreement between operands (message names both shapes).
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Invalid configuration value or combination.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Malformed or unreadable input data.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace s2sl
