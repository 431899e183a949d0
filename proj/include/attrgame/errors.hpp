#pragma once

#include <stdexcept>
#include <string>

namespace attrgame {

// Error categories map onto CLI exit codes: schema 2, config 3, topology 4,
// anything else 1.

struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct TopologyError : std::runtime_error {
    explicit TopologyError(const std::string& msg) : std::runtime_error(msg) {}
};

// Exhaustive-oracle explosion guards and finite-difference boundary guards.
struct GuardError : std::runtime_error {
    explicit GuardError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace attrgame
