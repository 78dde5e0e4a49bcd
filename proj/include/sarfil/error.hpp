#pragma once

#include <stdexcept>
#include <string>

namespace sarfil {

// Bad paths, malformed configuration, unusable arguments. CLI exit code 1.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input rows, geometry mismatches, coverage gaps, missing scenes.
// CLI exit code 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace sarfil
