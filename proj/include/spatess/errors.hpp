#pragma once
// Error taxonomy mirrored by CLI exit codes: config=2, compute=3, infeasible=4.
#include <stdexcept>
#include <string>

namespace spatess {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ComputeError : std::runtime_error {
    explicit ComputeError(const std::string& msg) : std::runtime_error(msg) {}
};

struct InfeasibleError : std::runtime_error {
    explicit InfeasibleError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace spatess
