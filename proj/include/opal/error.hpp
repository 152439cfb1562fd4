#pragma once

#include <stdexcept>
#include <string>

namespace opal {

/// Invalid user configuration (bad flag values, unknown keys, inconsistent parameters).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or inconsistent input data (containers, PFM files, dimension mismatches).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace opal
