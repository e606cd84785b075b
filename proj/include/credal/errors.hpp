#pragma once

#include <stdexcept>
#include <string>

namespace credal {

// Shape/dimension mismatch between tensors. Messages name both shapes.
struct ShapeError : std::invalid_argument {
    explicit ShapeError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Invalid configuration (non-divisible head count, bad sizes, ...).
struct ConfigError : std::invalid_argument {
    explicit ConfigError(const std::string& msg) : std::invalid_argument(msg) {}
};

// API contract violation (non-scalar loss, uncertainty readout on a
// standard-attention model, fully masked row, ...).
struct ContractError : std::logic_error {
    explicit ContractError(const std::string& msg) : std::logic_error(msg) {}
};

// Bad runtime input (token id out of range, label out of range, ...).
struct InputError : std::out_of_range {
    explicit InputError(const std::string& msg) : std::out_of_range(msg) {}
};

}  // namespace credal
