#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace naxon {

// Grid too coarse or inconsistent for the requested operator.
struct InvalidGrid : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of an operation (x outside [0,1], dt <= 0, ...).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Two objects that must live on the same grid do not.
struct GridMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Construction of a kernel or matrix produced non-finite entries.
struct ConstructionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Simulation produced a non-finite state.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(std::size_t step, const std::string& what)
        : std::runtime_error("divergence at step " + std::to_string(step) + ": " + what), step_(step) {}

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

// Invalid user configuration; `key` names the offending entry.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string key, const std::string& what)
        : std::invalid_argument(key + ": " + what), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

}  // namespace naxon
