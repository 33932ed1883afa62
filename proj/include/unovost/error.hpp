// Error types shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace unovost {

// Malformed data in an input file (bad RLE, bad schema, bad magic, ...).
struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// A caller violated an API precondition.
struct ContractError : std::logic_error {
    explicit ContractError(const std::string& msg) : std::logic_error(msg) {}
};

// A required input is missing or unreadable.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid configuration or scenario specification.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace unovost
