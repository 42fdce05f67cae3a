#pragma once

#include <stdexcept>
#include <string>

namespace pfl {

// Bad configuration: malformed scenario, inconsistent grids, invalid
// parameters. Maps to process exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad runtime input to an operation (empty sample set, etc.).
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure (non-finite values, failed convergence). Exit code 4.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Instrument/model combination the engine does not price.
class UnsupportedInstrumentError : public ConfigError {
public:
    explicit UnsupportedInstrumentError(const std::string& msg) : ConfigError(msg) {}
};

} // namespace pfl
